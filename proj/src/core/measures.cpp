#include "measures.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "bits.hpp"

namespace twa {

namespace {

constexpr int kMaxExactN = 22;
constexpr int kMaxExactSide = 16;
constexpr int kMaxExhaustiveN = 8;

void check_order(const VariableOrder& order, int n) {
    if (!is_valid_order(order, n))
        throw std::invalid_argument("variable order must be a permutation of 0..n-1");
}

void check_split(int i, int n) {
    if (i < 1 || i > n - 1)
        throw std::invalid_argument("split must lie in [1, n-1]");
}

// Truth table of f indexed by mask form (bit j of the index = variable j).
std::vector<uint64_t> mask_table(const FunctionOracle& f) {
    const int n = f.arity();
    const uint64_t rows = uint64_t{1} << n;
    std::vector<uint64_t> table((rows + 63) / 64, 0);
    for (uint64_t msk = 0; msk < rows; ++msk)
        if (f.eval_mask(msk)) table[msk >> 6] |= uint64_t{1} << (msk & 63);
    return table;
}

bool table_bit(const std::vector<uint64_t>& table, uint64_t idx) {
    return (table[idx >> 6] >> (idx & 63)) & 1;
}

// Distinct chunks of 2^(n-i) consecutive bits among the 2^i chunks of the
// reordered table, where row idx places bit (n-1-k) of idx at order[k].
uint64_t count_chunks(const std::vector<uint64_t>& mtable, const VariableOrder& order,
                      int n, int i) {
    const uint64_t prefixes = uint64_t{1} << i;
    const int suffix_bits = n - i;
    const uint64_t suffixes = uint64_t{1} << suffix_bits;
    const size_t chunk_words = (suffixes + 63) / 64;
    std::vector<std::vector<uint64_t>> chunks;
    chunks.reserve(prefixes);
    // Per ordered position, the mask bit it controls.
    std::vector<uint64_t> weight(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        weight[static_cast<size_t>(k)] = uint64_t{1} << order[static_cast<size_t>(k)];
    for (uint64_t p = 0; p < prefixes; ++p) {
        uint64_t pmask = 0;
        for (int k = 0; k < i; ++k)
            if ((p >> (i - 1 - k)) & 1) pmask |= weight[static_cast<size_t>(k)];
        std::vector<uint64_t> chunk(chunk_words, 0);
        for (uint64_t s = 0; s < suffixes; ++s) {
            uint64_t msk = pmask;
            for (int k = 0; k < suffix_bits; ++k)
                if ((s >> (suffix_bits - 1 - k)) & 1)
                    msk |= weight[static_cast<size_t>(i + k)];
            if (table_bit(mtable, msk)) chunk[s >> 6] |= uint64_t{1} << (s & 63);
        }
        chunks.push_back(std::move(chunk));
    }
    std::sort(chunks.begin(), chunks.end());
    return static_cast<uint64_t>(
        std::unique(chunks.begin(), chunks.end()) - chunks.begin());
}

uint64_t max_over_splits(const std::vector<uint64_t>& mtable, const VariableOrder& order,
                         int n, uint64_t prune_at) {
    uint64_t best = 0;
    for (int i = 1; i <= n - 1; ++i) {
        best = std::max(best, count_chunks(mtable, order, n, i));
        if (best >= prune_at) return best;  // early abandon for searches
    }
    return best;
}

}  // namespace

VariableOrder identity_order(int n) {
    VariableOrder order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    return order;
}

bool is_valid_order(const VariableOrder& order, int n) {
    if (static_cast<int>(order.size()) != n) return false;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int v : order) {
        if (v < 0 || v >= n || seen[static_cast<size_t>(v)]) return false;
        seen[static_cast<size_t>(v)] = 1;
    }
    return true;
}

uint64_t count_subfunctions(const FunctionOracle& f, const VariableOrder& order, int i) {
    const int n = f.arity();
    check_order(order, n);
    check_split(i, n);
    if (n > kMaxExactN)
        throw std::invalid_argument(
            "exact subfunction counting supports n <= 22; use "
            "sampled_subfunction_lower_bound for larger n");
    if (std::min(i, n - i) > kMaxExactSide)
        throw std::invalid_argument(
            "exact subfunction counting needs min(i, n-i) <= 16; use "
            "sampled_subfunction_lower_bound instead");
    return count_chunks(mask_table(f), order, n, i);
}

uint64_t max_subfunctions(const FunctionOracle& f, const VariableOrder& order) {
    const int n = f.arity();
    check_order(order, n);
    if (n > kMaxExactN)
        throw std::invalid_argument(
            "exact subfunction counting supports n <= 22; use "
            "sampled_subfunction_lower_bound for larger n");
    return max_over_splits(mask_table(f), order, n, ~uint64_t{0});
}

OrderSearchResult min_subfunctions_exhaustive(const FunctionOracle& f) {
    const int n = f.arity();
    if (n < 2 || n > kMaxExhaustiveN)
        throw std::invalid_argument("exhaustive order search supports 2 <= n <= 8");
    const auto mtable = mask_table(f);
    VariableOrder order = identity_order(n);
    OrderSearchResult best{~uint64_t{0}, order};
    do {
        const uint64_t value = max_over_splits(mtable, order, n, best.value);
        if (value < best.value) best = {value, order};
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

OrderSearchResult min_subfunctions_heuristic(const FunctionOracle& f, uint64_t seed,
                                             int restarts) {
    const int n = f.arity();
    if (n < 2 || n > kMaxExactN)
        throw std::invalid_argument("heuristic order search supports 2 <= n <= 22");
    if (restarts <= 0) restarts = std::max(4, n);
    const auto mtable = mask_table(f);
    Xoshiro256 rng(seed);
    OrderSearchResult best{~uint64_t{0}, identity_order(n)};
    for (int r = 0; r < restarts; ++r) {
        VariableOrder order = identity_order(n);
        if (r > 0) std::shuffle(order.begin(), order.end(), rng);
        uint64_t value = max_over_splits(mtable, order, n, ~uint64_t{0});
        for (bool improved = true; improved;) {
            improved = false;
            for (int k = 0; k + 1 < n; ++k) {
                std::swap(order[static_cast<size_t>(k)], order[static_cast<size_t>(k) + 1]);
                const uint64_t cand = max_over_splits(mtable, order, n, value);
                if (cand < value) {
                    value = cand;
                    improved = true;
                } else {
                    std::swap(order[static_cast<size_t>(k)],
                              order[static_cast<size_t>(k) + 1]);
                }
            }
        }
        if (value < best.value) best = {value, order};
    }
    return best;
}

uint64_t count_equivalence_classes(const FunctionOracle& f, int r) {
    const int n = f.arity();
    check_split(r, n);
    if (n > kMaxExactN)
        throw std::invalid_argument("equivalence class counting supports n <= 22");
    const uint64_t prefixes = uint64_t{1} << r;
    const int suffix_bits = n - r;
    const uint64_t suffixes = uint64_t{1} << suffix_bits;
    std::set<std::vector<uint64_t>> rows;
    Word w(static_cast<size_t>(n));
    for (uint64_t p = 0; p < prefixes; ++p) {
        for (int j = 0; j < r; ++j)
            w[static_cast<size_t>(j)] = (p >> (r - 1 - j)) & 1;
        std::vector<uint64_t> row((suffixes + 63) / 64, 0);
        for (uint64_t s = 0; s < suffixes; ++s) {
            for (int j = 0; j < suffix_bits; ++j)
                w[static_cast<size_t>(r + j)] = (s >> (suffix_bits - 1 - j)) & 1;
            if (f.eval(w)) row[s >> 6] |= uint64_t{1} << (s & 63);
        }
        rows.insert(std::move(row));
    }
    return rows.size();
}

uint64_t max_equivalence_classes(const FunctionOracle& f) {
    uint64_t best = 0;
    for (int r = 1; r <= f.arity() - 1; ++r)
        best = std::max(best, count_equivalence_classes(f, r));
    return best;
}

int identity_order_mismatch_split(const FunctionOracle& f) {
    const int n = f.arity();
    const auto order = identity_order(n);
    for (int i = 1; i <= n - 1; ++i)
        if (count_subfunctions(f, order, i) != count_equivalence_classes(f, i))
            return i;
    return 0;
}

uint64_t sampled_subfunction_lower_bound(const FunctionOracle& f,
                                         const VariableOrder& order, int i,
                                         uint64_t num_prefixes, int num_probes,
                                         uint64_t seed) {
    const int n = f.arity();
    check_order(order, n);
    check_split(i, n);
    if (num_prefixes == 0 || num_probes <= 0)
        throw std::invalid_argument("sampled bound needs prefixes and probes");
    const int suffix_bits = n - i;
    // Requesting at least 2^i prefixes (or 2^(n-i) probes) upgrades that side
    // to full deterministic enumeration; with both sides enumerated the bound
    // equals the exact subfunction count.
    const bool all_prefixes = i < 63 && num_prefixes >= (uint64_t{1} << i);
    const bool all_probes = suffix_bits <= 20 && num_probes >= (1 << suffix_bits);
    if (all_prefixes) num_prefixes = uint64_t{1} << i;
    if (all_probes) num_probes = 1 << suffix_bits;
    Xoshiro256 rng(seed);
    // Shared probe suffixes, drawn once so prefix responses are comparable.
    std::vector<Word> probes;
    probes.reserve(static_cast<size_t>(num_probes));
    for (int j = 0; j < num_probes; ++j) {
        Word s(static_cast<size_t>(suffix_bits));
        if (all_probes) {
            for (int k = 0; k < suffix_bits; ++k)
                s[static_cast<size_t>(k)] = (j >> (suffix_bits - 1 - k)) & 1;
        } else {
            for (auto& b : s) b = rng.coin() ? 1 : 0;
        }
        probes.push_back(std::move(s));
    }
    std::set<std::vector<uint64_t>> responses;
    Word w(static_cast<size_t>(n));
    for (uint64_t p = 0; p < num_prefixes; ++p) {
        Word prefix(static_cast<size_t>(i));
        if (all_prefixes) {
            for (int k = 0; k < i; ++k)
                prefix[static_cast<size_t>(k)] = (p >> (i - 1 - k)) & 1;
        } else {
            for (auto& b : prefix) b = rng.coin() ? 1 : 0;
        }
        std::vector<uint64_t> row((static_cast<uint64_t>(num_probes) + 63) / 64, 0);
        for (int j = 0; j < num_probes; ++j) {
            for (int k = 0; k < i; ++k)
                w[static_cast<size_t>(order[static_cast<size_t>(k)])] =
                    prefix[static_cast<size_t>(k)];
            for (int k = 0; k < suffix_bits; ++k)
                w[static_cast<size_t>(order[static_cast<size_t>(i + k)])] =
                    probes[static_cast<size_t>(j)][static_cast<size_t>(k)];
            if (f.eval(w)) row[static_cast<size_t>(j) >> 6] |= uint64_t{1} << (j & 63);
        }
        responses.insert(std::move(row));
    }
    return responses.size();
}

}  // namespace twa
