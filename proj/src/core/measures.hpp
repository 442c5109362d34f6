// Complexity measures of Boolean functions: subfunction counts under a
// variable order, order search (exhaustive and heuristic), prefix-equivalence
// class counts, and a sampled subfunction lower bound for large n.
#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"
#include "witness.hpp"

namespace twa {

// order[k] = 0-based variable placed at ordered position k. Position 0 is
// read first (most significant in table indexing).
using VariableOrder = std::vector<int>;

VariableOrder identity_order(int n);
bool is_valid_order(const VariableOrder& order, int n);

// Number of distinct subfunctions of the reordered function obtained by
// fixing the first i ordered variables, 1 <= i <= n-1. Exact; requires
// n <= 22 and min(i, n-i) <= 16, otherwise throws and points at
// sampled_subfunction_lower_bound.
uint64_t count_subfunctions(const FunctionOracle& f, const VariableOrder& order, int i);

// Max of count_subfunctions over all splits i in [1, n-1].
uint64_t max_subfunctions(const FunctionOracle& f, const VariableOrder& order);

struct OrderSearchResult {
    uint64_t value = 0;
    VariableOrder order;
};

// Minimum over all n! variable orders (n <= 8), with early abandoning.
OrderSearchResult min_subfunctions_exhaustive(const FunctionOracle& f);

// Seeded random-restart hill climbing over adjacent transpositions.
OrderSearchResult min_subfunctions_heuristic(const FunctionOracle& f, uint64_t seed,
                                             int restarts = 0);

// Number of equivalence classes of length-r prefixes (two prefixes are
// equivalent when every suffix completes them to the same value). Computed
// directly from oracle evaluations, independently of count_subfunctions.
uint64_t count_equivalence_classes(const FunctionOracle& f, int r);

// Max of count_equivalence_classes over r in [1, n-1].
uint64_t max_equivalence_classes(const FunctionOracle& f);

// Checks count_subfunctions under the identity order against
// count_equivalence_classes at every split; returns the first split where
// they disagree, or 0 if they agree everywhere.
int identity_order_mismatch_split(const FunctionOracle& f);

/// Lower bound on the subfunction count at one split: distinct response
// vectors of num_prefixes random prefixes on num_probes shared random
// suffixes. Deterministic for a fixed seed. Asking for at least 2^i
// prefixes (or 2^(n-i) probes, when n-i <= 20) switches that side to full
// enumeration, so covering both sides reproduces the exact count.
uint64_t sampled_subfunction_lower_bound(const FunctionOracle& f,
                                         const VariableOrder& order, int i,
                                         uint64_t num_prefixes, int num_probes,
                                         uint64_t seed);

}  // namespace twa
