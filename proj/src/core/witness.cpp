#include "witness.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twa {

namespace {

[[noreturn]] void inequality_error(const char* lhs_desc, long lhs, int n) {
    std::ostringstream ss;
    ss << "parameter inequality violated: " << lhs_desc << " = " << lhs
       << " must be < n = " << n;
    throw std::invalid_argument(ss.str());
}

// Shared two-round chain: Step_2(-1)=2, Step_1(i)=Val(Step_2(i-1))+t,
// Step_2(i)=Val(Step_1(i)); any failed lookup forces result 0.
template <typename ValFn>
int chain_eval(int t, ValFn&& val, SafTrace* trace) {
    SafTrace tr;
    auto finish = [&](int result) {
        tr.result = result;
        if (trace) *trace = tr;
        return result;
    };
    int v = val(tr.step2_m1);
    tr.step1_0 = v < 0 ? -1 : v + t;
    if (v < 0) return finish(0);
    v = val(tr.step1_0);
    tr.step2_0 = v;
    if (v < 0) return finish(0);
    v = val(tr.step2_0);
    tr.step1_1 = v < 0 ? -1 : v + t;
    if (v < 0) return finish(0);
    v = val(tr.step1_1);
    tr.step2_1 = v;
    if (v < 0) return finish(0);
    return finish(tr.step2_1 > 0 ? 1 : 0);
}

void check_word(const Word& x, int n) {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("input length does not match the parameters");
}

}  // namespace

SafParams saf_params(int n, int t) {
    if (t < 2) throw std::invalid_argument("t must be at least 2");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    SafParams pr;
    pr.n = n;
    pr.t = t;
    pr.c = ceil_log2(static_cast<unsigned>(2 * t));
    const long lhs = 2L * t * (2L * t + pr.c);
    if (lhs >= n) inequality_error("2t(2t+ceil(log2 2t))", lhs, n);
    pr.q = n / (2 * t);
    pr.b = pr.q - pr.c;
    if (pr.b < t + 1)
        throw std::invalid_argument("block layout too narrow: q - c < t + 1");
    return pr;
}

int saf_adr(const SafParams& pr, const Word& x, int p) {
    const int base = p * pr.q;
    int a = 0, w = 1 % (2 * pr.t);
    for (int j = 0; j < pr.c; ++j) {
        if (x[static_cast<size_t>(base + j)]) a = (a + w) % (2 * pr.t);
        w = (w * 2) % (2 * pr.t);
    }
    return a;
}

int saf_ind(const SafParams& pr, const Word& x, int a) {
    for (int p = 0; p < 2 * pr.t; ++p)
        if (saf_adr(pr, x, p) == a) return p;
    return -1;
}

int saf_val(const SafParams& pr, const Word& x, int a) {
    const int p = saf_ind(pr, x, a);
    if (p < 0) return -1;
    const int base = p * pr.q;
    int sum = 0;
    for (int j = pr.c; j < pr.q; ++j) sum += x[static_cast<size_t>(base + j)];
    return sum % pr.t;
}

int saf_eval(const SafParams& pr, const Word& x, SafTrace* trace) {
    check_word(x, pr.n);
    return chain_eval(pr.t, [&](int a) { return saf_val(pr, x, a); }, trace);
}

UsafParams usaf_params(int n, int t) {
    if (t < 2) throw std::invalid_argument("t must be at least 2");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    UsafParams pr;
    pr.n = n;
    pr.t = t;
    pr.c = ceil_log2(static_cast<unsigned>(2 * t));
    const long lhs = 4L * t * (2L * t + pr.c);
    if (lhs >= n) inequality_error("4t(2t+ceil(log2 2t))", lhs, n);
    pr.q = n / (2 * t);
    if (pr.q % 2 != 0) throw std::invalid_argument("odd block width: q must be even");
    pr.b = pr.q / 2 - pr.c;
    return pr;
}

int usaf_adr(const UsafParams& pr, const Word& x, int p) {
    const int base = p * pr.q;
    int a = 0;
    for (int j = 0; j < pr.c; ++j) {
        a = (a * 2) % (2 * pr.t);
        if (x[static_cast<size_t>(base + 2 * j + 1)]) a = (a + 1) % (2 * pr.t);
    }
    return a;
}

int usaf_ind(const UsafParams& pr, const Word& x, int a) {
    for (int p = 0; p < 2 * pr.t; ++p)
        if (usaf_adr(pr, x, p) == a) return p;
    return -1;
}

int usaf_val(const UsafParams& pr, const Word& x, int a) {
    const int p = usaf_ind(pr, x, a);
    if (p < 0) return -1;
    const int base = p * pr.q;
    int sum = 0;
    for (int j = pr.c; j < pr.q / 2; ++j) sum += x[static_cast<size_t>(base + 2 * j + 1)];
    return sum % pr.t;
}

int usaf_eval(const UsafParams& pr, const Word& x, SafTrace* trace) {
    check_word(x, pr.n);
    return chain_eval(pr.t, [&](int a) { return usaf_val(pr, x, a); }, trace);
}

bool usaf_wellformed(const UsafParams& pr, const Word& x) {
    check_word(x, pr.n);
    for (int p = 0; p < 2 * pr.t; ++p) {
        const int base = p * pr.q;
        for (int j = 0; j < pr.q / 2; ++j) {
            const uint8_t expect = j < pr.c ? 0 : 1;
            if (x[static_cast<size_t>(base + 2 * j)] != expect) return false;
        }
    }
    return true;
}

int eq_eval(const Word& x) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("comparison function needs n >= 2");
    const int m = n / 2;
    for (int i = 0; i < m; ++i)
        if (x[static_cast<size_t>(i)] == x[static_cast<size_t>(i + m)]) return 1;
    return 0;
}

int FunctionOracle::eval_mask(uint64_t mask) const {
    return eval(mask_to_word(mask, arity()));
}

namespace {

class SafOracle final : public FunctionOracle {
public:
    explicit SafOracle(const SafParams& pr) : pr_(pr) {
        for (int p = 0; p < 2 * pr_.t; ++p) {
            uint64_t vm = 0;
            for (int j = pr_.c; j < pr_.q; ++j)
                if (p * pr_.q + j < 64) vm |= uint64_t{1} << (p * pr_.q + j);
            value_mask_.push_back(vm);
        }
    }
    int arity() const override { return pr_.n; }
    int eval(const Word& w) const override { return saf_eval(pr_, w); }
    int eval_mask(uint64_t mask) const override {
        if (pr_.n > 64) return FunctionOracle::eval_mask(mask);
        int adr[64];
        const int tt = 2 * pr_.t;
        for (int p = 0; p < tt; ++p) {
            int a = 0, w = 1 % tt;
            const int base = p * pr_.q;
            for (int j = 0; j < pr_.c; ++j) {
                if ((mask >> (base + j)) & 1) a = (a + w) % tt;
                w = (w * 2) % tt;
            }
            adr[p] = a;
        }
        auto val = [&](int a) {
            for (int p = 0; p < tt; ++p)
                if (adr[p] == a)
                    return std::popcount(mask & value_mask_[static_cast<size_t>(p)]) % pr_.t;
            return -1;
        };
        return chain_eval(pr_.t, val, nullptr);
    }
    std::string describe() const override {
        return "saf:t=" + std::to_string(pr_.t) + ",n=" + std::to_string(pr_.n);
    }

private:
    SafParams pr_;
    std::vector<uint64_t> value_mask_;
};

class UsafOracle final : public FunctionOracle {
public:
    explicit UsafOracle(const UsafParams& pr) : pr_(pr) {}
    int arity() const override { return pr_.n; }
    int eval(const Word& w) const override { return usaf_eval(pr_, w); }
    std::string describe() const override {
        return "usaf:t=" + std::to_string(pr_.t) + ",n=" + std::to_string(pr_.n);
    }
    const UsafParams& params() const { return pr_; }

private:
    UsafParams pr_;
};

class EqOracle final : public FunctionOracle {
public:
    explicit EqOracle(int n) : n_(n) {
        if (n < 2) throw std::invalid_argument("comparison function needs n >= 2");
    }
    int arity() const override { return n_; }
    int eval(const Word& w) const override { return eq_eval(w); }
    int eval_mask(uint64_t mask) const override {
        const int m = n_ / 2;
        const uint64_t mm = (m == 64) ? ~uint64_t{0} : ((uint64_t{1} << m) - 1);
        const uint64_t a = mask & mm, b = (mask >> m) & mm;
        return ((a ^ b) != mm) ? 1 : 0;
    }
    std::string describe() const override { return "eq,n=" + std::to_string(n_); }

private:
    int n_;
};

class TableOracle final : public FunctionOracle {
public:
    TableOracle(const std::string& bits, int n) : n_(n) {
        if (n < 1 || n > 26)
            throw std::invalid_argument("table oracles support 1 <= n <= 26");
        const size_t want = size_t{1} << n;
        if (bits.size() != want)
            throw std::invalid_argument("truth table must have exactly 2^n characters");
        table_.reserve(want);
        for (char ch : bits) {
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("truth table must consist of '0'/'1'");
            table_.push_back(ch == '1');
        }
    }
    int arity() const override { return n_; }
    int eval(const Word& w) const override {
        check_word(w, n_);
        return table_[static_cast<size_t>(word_to_index(w))];
    }
    int eval_mask(uint64_t mask) const override {
        uint64_t idx = 0;
        for (int j = 0; j < n_; ++j) idx = (idx << 1) | ((mask >> j) & 1);
        return table_[static_cast<size_t>(idx)];
    }
    std::string describe() const override { return "table,n=" + std::to_string(n_); }

private:
    int n_;
    std::vector<char> table_;
};

int parse_t(const std::string& spec, size_t at) {
    if (spec.compare(at, 2, "t=") != 0)
        throw std::invalid_argument("oracle spec expects t=<int>: " + spec);
    return std::stoi(spec.substr(at + 2));
}

}  // namespace

std::unique_ptr<FunctionOracle> make_saf_oracle(int t, int n) {
    return std::make_unique<SafOracle>(saf_params(n, t));
}

std::unique_ptr<FunctionOracle> make_usaf_oracle(int t, int n) {
    return std::make_unique<UsafOracle>(usaf_params(n, t));
}

std::unique_ptr<FunctionOracle> make_eq_oracle(int n) {
    return std::make_unique<EqOracle>(n);
}

std::unique_ptr<FunctionOracle> make_table_oracle(const std::string& bits, int n) {
    return std::make_unique<TableOracle>(bits, n);
}

std::unique_ptr<FunctionOracle> load_table_oracle(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open truth table file: " + path);
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return make_table_oracle(line, n);
}

std::unique_ptr<FunctionOracle> parse_oracle_spec(const std::string& spec, int n) {
    if (spec == "eq") return make_eq_oracle(n);
    if (spec.rfind("saf:", 0) == 0) return make_saf_oracle(parse_t(spec, 4), n);
    if (spec.rfind("usaf:", 0) == 0) return make_usaf_oracle(parse_t(spec, 5), n);
    if (spec.rfind("table:", 0) == 0) return load_table_oracle(spec.substr(6), n);
    throw std::invalid_argument("unknown oracle spec: " + spec);
}

}  // namespace twa
