// Big-integer size-bound arithmetic: forward bounds, inverse search, and the
// hierarchy-inequality calculator.
#include "bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace twa {
namespace {

void require_state_count(int d) {
    if (d < 1) throw std::invalid_argument("state count d must be at least 1");
}

mpz_class mpz_pow(const mpz_class& base, unsigned long exp) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

bool is_power_of_two(const mpz_class& x) {
    return x > 0 && mpz_popcount(x.get_mpz_t()) == 1;
}

// floor(sqrt(d)) for small non-negative ints.
int isqrt_int(int d) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(d)));
    while (r > 0 && static_cast<long>(r) * r > d) --r;
    while (static_cast<long>(r + 1) * (r + 1) <= d) ++r;
    return r;
}

// ceil(k * log2 x) computed exactly as ceil(log2 x^k); x >= 2, k >= 1.
long ceil_k_log2(long k, const mpz_class& x) {
    return ceil_log2_mpz(mpz_pow(x, static_cast<unsigned long>(k)));
}

std::string str(const mpz_class& x) { return x.get_str(); }

}  // namespace

int ceil_log2_mpz(const mpz_class& x) {
    if (x < 1) throw std::invalid_argument("ceil_log2_mpz needs x >= 1");
    // sizeinbase(x, 2) = floor(log2 x) + 1, exact for base 2.
    size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
    return static_cast<int>(is_power_of_two(x) ? bits - 1 : bits);
}

mpz_class det_size_bound(int d) {
    require_state_count(d);
    return mpz_pow(mpz_class(d + 1), static_cast<unsigned long>(d + 1));
}

mpz_class nondet_size_bound(int d) {
    require_state_count(d);
    unsigned long exp = static_cast<unsigned long>(d + 1) * (d + 1);
    return mpz_class(1) << exp;
}

mpz_class prob_size_bound(int d, uint64_t T, double eps) {
    require_state_count(d);
    if (T < 1) throw std::invalid_argument("time bound T must be at least 1");
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("eps must lie in (0, 1/2]");
    double denom = std::log2((1.0 + 2.0 * eps) * (1.0 + eps));
    double base_real = 4.0 * d * (8.0 + 3.0 * std::log2(static_cast<double>(T))) / denom;
    mpz_class base(std::ceil(base_real));
    unsigned long exp = static_cast<unsigned long>(d + 1) * (d + 1);
    return mpz_pow(base, exp);
}

mpz_class prob_size_bound_simplified(int d, uint64_t T) {
    require_state_count(d);
    if (T < 256) throw std::invalid_argument("simplified bound needs T >= 256");
    mpz_class t_mpz(static_cast<unsigned long>(T));
    mpz_class base;
    if (is_power_of_two(t_mpz)) {
        long e = static_cast<long>(mpz_sizeinbase(t_mpz.get_mpz_t(), 2)) - 1;
        base = mpz_class(32) * d * e;
    } else {
        // ceil(32 d log2 T) = ceil(log2 T^(32 d)), exact in big integers.
        base = ceil_k_log2(32L * d, t_mpz);
    }
    unsigned long exp = static_cast<unsigned long>(d + 1) * (d + 1);
    return mpz_pow(base, exp);
}

mpz_class size_bound(MachineKind kind, int d, uint64_t T, double eps) {
    switch (kind) {
        case MachineKind::det: return det_size_bound(d);
        case MachineKind::nondet: return nondet_size_bound(d);
        case MachineKind::prob: return prob_size_bound(d, T, eps);
    }
    throw std::invalid_argument("unknown machine kind");
}

int min_size_lower_bound(MachineKind kind, const mpz_class& N, uint64_t T, double eps) {
    if (N < 1) throw std::invalid_argument("subfunction count N must be at least 1");
    for (int d = 1; d <= 512; ++d) {
        if (size_bound(kind, d, T, eps) >= N) return d;
    }
    throw std::invalid_argument("subfunction count N exceeds every bound up to d = 512");
}

std::vector<HierarchyRow> hierarchy_report(int d_lo, int d_hi, const mpz_class& n,
                                           uint64_t T) {
    if (d_lo < 1 || d_hi < d_lo)
        throw std::invalid_argument("hierarchy grid needs 1 <= d_lo <= d_hi");
    if (n < 1) throw std::invalid_argument("input length n must be at least 1");
    mpz_class t_mpz(static_cast<unsigned long>(T));
    if (T < 256 || !is_power_of_two(t_mpz))
        throw std::invalid_argument("hierarchy prob rows need T >= 256 and a power of two");
    long log2_T = static_cast<long>(mpz_sizeinbase(t_mpz.get_mpz_t(), 2)) - 1;

    std::vector<HierarchyRow> rows;
    auto guarded = [&](const std::string& family, int d, bool ok, std::string guard,
                       const std::string& small_class, const std::string& large_class) {
        rows.push_back({family, d, ok, std::move(guard), small_class, large_class});
    };

    for (int d = d_lo; d <= d_hi; ++d) {
        // det: size d vs size 13d+43, needs 6(13d+43)^2 < n.
        {
            mpz_class big = 13 * mpz_class(d) + 43;
            mpz_class lhs = 6 * big * big;
            std::ostringstream g;
            g << "6*(13d+43)^2 = " << str(lhs) << (lhs < n ? " < " : " >= ")
              << "n = " << str(n);
            guarded("det", d, lhs < n, g.str(), std::to_string(d), str(big));
        }
        // nondet: size floor(sqrt(d)) vs size 13d+4, needs 13d+4 > 121 and
        // 6(13d+4)^2 < n.
        {
            mpz_class big = 13 * mpz_class(d) + 4;
            mpz_class lhs = 6 * big * big;
            bool g1 = big > 121;
            bool g2 = lhs < n;
            std::ostringstream g;
            g << "13d+4 = " << str(big) << (g1 ? " > " : " <= ") << "121 and "
              << "6*(13d+4)^2 = " << str(lhs) << (g2 ? " < " : " >= ") << "n = " << str(n);
            guarded("nondet", d, g1 && g2, g.str(), std::to_string(isqrt_int(d)), str(big));
        }
        // 2dfa / 2nfa: m = ceil(11 d log2 d), needs m > 1330 and 12 m^2 < n.
        {
            long m = d >= 2 ? ceil_k_log2(11L * d, mpz_class(d)) : 0;
            mpz_class lhs = 12 * mpz_class(m) * m;
            bool g1 = m > 1330;
            bool g2 = lhs < n;
            std::ostringstream g;
            g << "m = ceil(11 d log2 d) = " << m << (g1 ? " > " : " <= ") << "1330 and "
              << "12 m^2 = " << str(lhs) << (g2 ? " < " : " >= ") << "n = " << str(n);
            guarded("2dfa", d, g1 && g2, g.str(), std::to_string(d - 3), std::to_string(m));
            guarded("2nfa", d, g1 && g2, g.str(), std::to_string(isqrt_int(d)),
                    std::to_string(m));
        }
        // prob: size floor(sqrt(d))/(32 log2 T) vs size 13d+4, needs
        // 13d+4 > 30 and 6(13d+4)^2 < n.
        {
            mpz_class big = 13 * mpz_class(d) + 4;
            mpz_class lhs = 6 * big * big;
            bool g1 = big > 30;
            bool g2 = lhs < n;
            std::ostringstream g;
            g << "13d+4 = " << str(big) << (g1 ? " > " : " <= ") << "30 and "
              << "6*(13d+4)^2 = " << str(lhs) << (g2 ? " < " : " >= ") << "n = " << str(n);
            long denom = 32 * log2_T;
            long small = isqrt_int(d) / denom;  // floor(sqrt(d)/(32 log2 T))
            guarded("prob", d, g1 && g2, g.str(), std::to_string(small), str(big));
        }
    }
    return rows;
}

}  // namespace twa
