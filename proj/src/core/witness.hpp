// Reference evaluators for the pointer-chasing block functions (plain and
// mark-annotated variants) and the half-comparison function, plus the oracle
// abstraction used by counting and verification.
#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "bits.hpp"

namespace twa {

// Plain block layout: 2t blocks of q = floor(n/2t) variables; within a block
// the first c = ceil(log2 2t) variables are address bits (little-endian) and
// the remaining b = q - c are value bits. Trailing variables are ignored.
struct SafParams {
    int n = 0;
    int t = 0;
    int q = 0;
    int c = 0;
    int b = 0;
};

// Throws std::invalid_argument ("parameter inequality violated ...") when
// 2t(2t + c) < n fails, and on b < t + 1.
SafParams saf_params(int n, int t);

// Address of block p: sum of y_j * 2^j over address bits, mod 2t.
int saf_adr(const SafParams& pr, const Word& x, int p);
// Minimal block with address a, or -1.
int saf_ind(const SafParams& pr, const Word& x, int a);
// Sum of the value bits of block saf_ind(x, a) mod t; -1 when absent.
int saf_val(const SafParams& pr, const Word& x, int a);

// Two-round pointer chase; fields are -1 for a failed lookup and -2 when the
// chain had already failed (any failed lookup forces result 0).
struct SafTrace {
    int step2_m1 = 2;
    int step1_0 = -2;
    int step2_0 = -2;
    int step1_1 = -2;
    int step2_1 = -2;
    int result = 0;
};

int saf_eval(const SafParams& pr, const Word& x, SafTrace* trace = nullptr);

// Mark-annotated layout: blocks of q variables (q even), odd positions within
// a block (1-based) are mark bits and even positions are payloads; the first
// c payloads are address bits (big-endian), the remaining b = q/2 - c are
// value bits.
struct UsafParams {
    int n = 0;
    int t = 0;
    int q = 0;
    int c = 0;
    int b = 0;
};

// Throws when 4t(2t + c) < n fails, and when q is odd ("odd block width").
UsafParams usaf_params(int n, int t);

// Big-endian address: sum of y_j * 2^(c-1-j) mod 2t.
int usaf_adr(const UsafParams& pr, const Word& x, int p);
int usaf_ind(const UsafParams& pr, const Word& x, int a);
int usaf_val(const UsafParams& pr, const Word& x, int a);
int usaf_eval(const UsafParams& pr, const Word& x, SafTrace* trace = nullptr);

// True iff every block's marks are 0 exactly before the first c payloads and
// 1 before the rest.
bool usaf_wellformed(const UsafParams& pr, const Word& x);

// 1 iff some i < floor(n/2) has x_i == x_{i + floor(n/2)}.
int eq_eval(const Word& x);

class FunctionOracle {
public:
    virtual ~FunctionOracle() = default;
    virtual int arity() const = 0;
    virtual int eval(const Word& w) const = 0;
    // Little-endian packed input (bit j = variable j); n <= 64.
    virtual int eval_mask(uint64_t mask) const;
    virtual std::string describe() const = 0;
};

std::unique_ptr<FunctionOracle> make_saf_oracle(int t, int n);
std::unique_ptr<FunctionOracle> make_usaf_oracle(int t, int n);
std::unique_ptr<FunctionOracle> make_eq_oracle(int n);
// Truth table given as 2^n characters of 0/1; row index reads the input as a
// big-endian integer (variable 0 most significant).
std::unique_ptr<FunctionOracle> make_table_oracle(const std::string& bits, int n);
std::unique_ptr<FunctionOracle> load_table_oracle(const std::string& path, int n);

// Oracle identifiers: "saf:t=<t>", "usaf:t=<t>", "eq", "table:<path>".
// The arity n is supplied by the caller (machine or flag).
std::unique_ptr<FunctionOracle> parse_oracle_spec(const std::string& spec, int n);

}  // namespace twa
