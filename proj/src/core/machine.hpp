// Machine model: nonuniform two-way automata (one transition table per tape
// square) in deterministic/nondeterministic/probabilistic flavors, the uniform
// two-way DFA with endmarkers, input shuffling, and the well-formedness
// validators. States and squares are 0-based internally; serialization and
// violation reports use the 1-based external convention.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bits.hpp"

namespace twa {

enum class MachineKind { det, nondet, prob };

enum class HeadMove : int { left = -1, stay = 0, right = 1 };

struct TransitionTarget {
    int state;
    HeadMove move;
    double prob = 1.0;  // meaningful for prob machines only
};

using TargetList = std::vector<TransitionTarget>;

// theta: input symbol j (0-based) is placed on tape square to_square[j].
struct ShufflePermutation {
    std::vector<int> to_square;

    bool is_permutation() const;
};

// Applies theta to a word: out[theta(j)] = w[j]. Throws on arity mismatch.
Word apply_shuffle(const ShufflePermutation& theta, const Word& w);

struct NonuniformMachine {
    MachineKind kind = MachineKind::det;
    int n = 0;           // input length
    int num_states = 0;  // total states, including accept and reject
    int initial = 0;
    int accept = 0;
    int reject = 0;
    std::optional<ShufflePermutation> shuffle;
    // Indexed by (pos * num_states + state) * 2 + symbol; halting-state rows
    // stay empty (halting states have no outgoing transitions).
    std::vector<TargetList> delta;

    static NonuniformMachine make(MachineKind kind, int n, int num_states, int initial,
                                  int accept, int reject);

    bool is_halting(int state) const { return state == accept || state == reject; }

    size_t slot(int pos, int state, int sym) const {
        return (static_cast<size_t>(pos) * num_states + state) * 2 + sym;
    }
    TargetList& at(int pos, int state, int sym) { return delta[slot(pos, state, sym)]; }
    const TargetList& at(int pos, int state, int sym) const {
        return delta[slot(pos, state, sym)];
    }

    int working_states() const { return num_states - 2; }
};

// Uniform machine alphabet: input bits 0/1 plus the endmarkers.
constexpr int kSymZero = 0;
constexpr int kSymOne = 1;
constexpr int kSymLeftEnd = 2;   // serialized "<"
constexpr int kSymRightEnd = 3;  // serialized ">"
constexpr int kUniformSyms = 4;

struct UniformTwoWayMachine {
    MachineKind kind = MachineKind::det;  // det or nondet
    int num_states = 0;
    int initial = 0;
    int accept = 0;
    int reject = 0;
    // Indexed by state * 4 + symbol; halting-state rows stay empty.
    std::vector<TargetList> delta;

    static UniformTwoWayMachine make(MachineKind kind, int num_states, int initial,
                                     int accept, int reject);

    bool is_halting(int state) const { return state == accept || state == reject; }

    size_t slot(int state, int sym) const {
        return static_cast<size_t>(state) * kUniformSyms + sym;
    }
    TargetList& at(int state, int sym) { return delta[slot(state, sym)]; }
    const TargetList& at(int state, int sym) const { return delta[slot(state, sym)]; }
};

// One violated constraint; coordinates are 1-based for reporting, -1 = n/a.
struct Violation {
    std::string message;
    int pos = -1;
    int state = -1;
    int symbol = -1;

    std::string format() const;
};

// Checks the model constraints: complete tables (det: exactly one target;
// prob: probabilities >= 0 summing to 1 within 1e-12), no Left move on the
// first square, no non-halting Right move on the last square, halting states
// entered only on the last square, shuffle a permutation. Returns one entry
// per violated constraint; empty means valid.
std::vector<Violation> validate_machine(const NonuniformMachine& m);

// Uniform analogue: no Left on the left endmarker, no non-halting Right on
// the right endmarker, halting entered only on the right endmarker.
std::vector<Violation> validate_uniform(const UniformTwoWayMachine& m);

// Reinterprets a deterministic machine as nondet (singleton sets) or prob
// (point masses); used by the embedding property checks.
NonuniformMachine embed_as(const NonuniformMachine& det_machine, MachineKind kind);

}  // namespace twa
