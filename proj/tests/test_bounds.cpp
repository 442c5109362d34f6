// Big-integer size bounds, the inverse minimum-size search, and the
// hierarchy-guard calculator.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include "core/bounds.hpp"

using namespace twa;

TEST_CASE("exact ceil(log2)") {
    CHECK(ceil_log2_mpz(1) == 0);
    CHECK(ceil_log2_mpz(2) == 1);
    CHECK(ceil_log2_mpz(3) == 2);
    CHECK(ceil_log2_mpz(4) == 2);
    CHECK(ceil_log2_mpz(5) == 3);
    CHECK(ceil_log2_mpz(mpz_class(1) << 40) == 40);
    CHECK(ceil_log2_mpz((mpz_class(1) << 40) + 1) == 41);
    CHECK_THROWS_AS((void)ceil_log2_mpz(0), std::invalid_argument);
}

TEST_CASE("size-bound formulas at frozen points") {
    CHECK(det_size_bound(4) == 3125);               // 5^5
    CHECK(det_size_bound(1) == 4);                  // 2^2
    CHECK(nondet_size_bound(2) == 512);             // 2^9
    CHECK(nondet_size_bound(3) == 65536);           // 2^16
    mpz_class s512_9;
    mpz_ui_pow_ui(s512_9.get_mpz_t(), 512, 9);
    CHECK(prob_size_bound_simplified(2, 256) == s512_9);  // (32*2*8)^9
    // T = 1000 is not a power of two: base = ceil(log2 1000^64) = 638.
    mpz_class s_odd;
    mpz_ui_pow_ui(s_odd.get_mpz_t(), 638, 9);
    CHECK(prob_size_bound_simplified(2, 1000) == s_odd);
    CHECK(size_bound(MachineKind::det, 4) == 3125);
    CHECK(size_bound(MachineKind::nondet, 2) == 512);
}

TEST_CASE("analytic bound stays below its simplification") {
    for (int d = 1; d <= 16; ++d) {
        for (uint64_t T : {uint64_t{256}, uint64_t{1} << 10, uint64_t{1} << 16}) {
            CHECK(prob_size_bound(d, T, 0.2) <= prob_size_bound_simplified(d, T));
        }
    }
    CHECK_THROWS_AS((void)prob_size_bound(2, 0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS((void)prob_size_bound(2, 256, 0.7), std::invalid_argument);
    CHECK_THROWS_AS((void)prob_size_bound_simplified(2, 128), std::invalid_argument);
}

TEST_CASE("bounds grow monotonically in d") {
    for (MachineKind kind : {MachineKind::det, MachineKind::nondet, MachineKind::prob}) {
        mpz_class prev = 0;
        for (int d = 1; d <= 64; ++d) {
            const mpz_class cur = size_bound(kind, d);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("minimum-size search inverts the bounds") {
    CHECK(min_size_lower_bound(MachineKind::det, 1024) == 4);
    CHECK(min_size_lower_bound(MachineKind::det, 3125) == 4);
    CHECK(min_size_lower_bound(MachineKind::det, 3126) == 5);
    CHECK(min_size_lower_bound(MachineKind::nondet, mpz_class(1) << 16) == 3);
    CHECK(min_size_lower_bound(MachineKind::nondet, (mpz_class(1) << 16) + 1) == 4);
    CHECK(min_size_lower_bound(MachineKind::det, 1) == 1);
    CHECK(min_size_lower_bound(MachineKind::prob, 1) == 1);
    // Consistency: the reported d satisfies the bound and d-1 does not.
    for (int e : {10, 100, 1000}) {
        const mpz_class N = mpz_class(1) << e;
        for (MachineKind kind :
             {MachineKind::det, MachineKind::nondet, MachineKind::prob}) {
            const int d = min_size_lower_bound(kind, N);
            CHECK(size_bound(kind, d) >= N);
            if (d > 1) CHECK(size_bound(kind, d - 1) < N);
        }
    }
    CHECK_THROWS_AS((void)min_size_lower_bound(MachineKind::det, 0),
                    std::invalid_argument);
}

TEST_CASE("hierarchy guards at frozen grid points") {
    // d = 3, n = 10000: 6*(13*3+43)^2 = 40344 >= 10000, so the det guard fails;
    // n = 50000 satisfies it.
    const auto small = hierarchy_report(3, 3, 10000);
    REQUIRE(small.size() == 5);
    CHECK(small[0].family == "det");
    CHECK_FALSE(small[0].guard_satisfied);
    CHECK(small[0].guard == "6*(13d+43)^2 = 40344 >= n = 10000");

    const auto big = hierarchy_report(3, 3, 50000);
    CHECK(big[0].guard_satisfied);
    CHECK(big[0].guard == "6*(13d+43)^2 = 40344 < n = 50000");
    CHECK(big[0].small_class == "3");
    CHECK(big[0].large_class == "82");
    // nondet needs 13d+4 > 121, not met at d = 3.
    CHECK(big[1].family == "nondet");
    CHECK_FALSE(big[1].guard_satisfied);
    // prob guard 13d+4 = 43 > 30 and the quadratic holds.
    CHECK(big[4].family == "prob");
    CHECK(big[4].guard_satisfied);
    CHECK(big[4].small_class == "0");  // floor(sqrt(3)) / 256
    CHECK(big[4].large_class == "43");

    // d = 27: m = ceil(11*27*log2 27) = 1413 (the exact value of
    // 297*log2(27) is 1412.20..., so the ceiling is 1413).
    const auto deep = hierarchy_report(27, 27, mpz_class("30000000"));
    CHECK(deep[2].family == "2dfa");
    CHECK(deep[2].guard_satisfied);
    CHECK(deep[2].guard ==
          "m = ceil(11 d log2 d) = 1413 > 1330 and 12 m^2 = 23958828 < n = 30000000");
    CHECK(deep[2].small_class == "24");
    CHECK(deep[2].large_class == "1413");
    CHECK(deep[3].family == "2nfa");
    CHECK(deep[3].small_class == "5");  // floor(sqrt(27))

    CHECK_THROWS_AS((void)hierarchy_report(0, 3, 1000), std::invalid_argument);
    CHECK_THROWS_AS((void)hierarchy_report(3, 2, 1000), std::invalid_argument);
    CHECK_THROWS_AS((void)hierarchy_report(1, 2, 1000, 100), std::invalid_argument);
    CHECK_THROWS_AS((void)hierarchy_report(1, 2, 1000, 300), std::invalid_argument);
}
