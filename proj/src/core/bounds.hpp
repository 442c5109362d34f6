// Size-bound formulas for the three machine kinds (big-integer exact), the
// inverse minimum-size search, and the hierarchy-inequality calculator.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "machine.hpp"

namespace twa {

// Exact ceil(log2 x) for x >= 1.
int ceil_log2_mpz(const mpz_class& x);

mpz_class det_size_bound(int d);     // (d+1)^(d+1)
mpz_class nondet_size_bound(int d);  // 2^((d+1)^2)

// ceil(4d(8 + 3 log2 T) / log2((1+2eps)(1+eps)))^((d+1)^2); eps in (0, 1/2].
mpz_class prob_size_bound(int d, uint64_t T, double eps);

// (32 d log2 T)^((d+1)^2) with eps fixed at 1/5 and T >= 256. Exact when T is
// a power of two; otherwise the base is rounded up exactly via big integers.
mpz_class prob_size_bound_simplified(int d, uint64_t T);

mpz_class size_bound(MachineKind kind, int d, uint64_t T = 256, double eps = 0.2);

// Smallest d >= 1 with size_bound(kind, d) >= N: any machine of this kind
// computing a function with subfunction count N needs at least d states.
int min_size_lower_bound(MachineKind kind, const mpz_class& N, uint64_t T = 256,
                         double eps = 0.2);

struct HierarchyRow {
    std::string family;  // "det" | "nondet" | "2dfa" | "2nfa" | "prob"
    int d = 0;
    bool guard_satisfied = false;
    std::string guard;        // rendered guard arithmetic with both sides
    std::string small_class;  // size of the weaker machine class
    std::string large_class;  // size of the stronger machine class
};

// Evaluates each family's guard inequalities for d in [d_lo, d_hi] against
// input length n; prob rows use T (>= 256) with eps >= 1/5 assumed.
std::vector<HierarchyRow> hierarchy_report(int d_lo, int d_hi, const mpz_class& n,
                                           uint64_t T = 256);

}  // namespace twa
