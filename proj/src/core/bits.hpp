// Bit-string words and truth-table indexing helpers.
//
// A Word stores one bit per byte, word[j] being the symbol of square j+1.
// Truth-table index of a word: big-endian in the word, i.e. bit 0 of the
// word is the most significant bit of the index. Mask form packs word[j]
// into bit j of a uint64_t (so mask form is little-endian; the two layouts
// serve different consumers and each conversion says which it uses).
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace twa {

using Word = std::vector<uint8_t>;

inline int ceil_log2(unsigned x) {  // ceil(log2 x) for x >= 1
    return x <= 1 ? 0 : std::bit_width(x - 1);
}

inline Word word_from_string(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        if (c == '0') w.push_back(0);
        else if (c == '1') w.push_back(1);
        else throw std::invalid_argument("word must consist of '0'/'1' characters");
    }
    return w;
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (uint8_t b : w) s.push_back(b ? '1' : '0');
    return s;
}

// word[j] -> bit j (little-endian packing); requires n <= 64.
inline uint64_t word_to_mask(const Word& w) {
    uint64_t m = 0;
    for (size_t j = 0; j < w.size(); ++j)
        if (w[j]) m |= uint64_t{1} << j;
    return m;
}

inline Word mask_to_word(uint64_t m, int n) {
    Word w(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) w[static_cast<size_t>(j)] = (m >> j) & 1;
    return w;
}

// Truth-table row index: word[0] is the most significant bit.
inline uint64_t word_to_index(const Word& w) {
    uint64_t idx = 0;
    for (uint8_t b : w) idx = (idx << 1) | b;
    return idx;
}

inline Word index_to_word(uint64_t idx, int n) {
    Word w(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        w[static_cast<size_t>(j)] = (idx >> (n - 1 - j)) & 1;
    return w;
}

inline int popcount_word(const Word& w) {
    int c = 0;
    for (uint8_t b : w) c += b;
    return c;
}

}  // namespace twa
