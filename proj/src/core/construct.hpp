// Explicit machine constructions for the witness functions, with state
// accounting reports against the promised size bounds.
#pragma once

#include <string>
#include <vector>

#include "machine.hpp"

namespace twa {

struct PhaseCount {
    std::string name;
    int states = 0;
};

struct ConstructionReport {
    std::string builder;  // "saf" | "usaf" | "eq"
    int t = 0;            // 0 when the builder has no t parameter
    int n = 0;            // 0 for uniform (any-length) builders
    int actual_states = 0;
    int declared_state_bound = 0;
    std::vector<PhaseCount> phase_state_accounting;
    std::vector<std::string> notes;
};

std::string report_to_json(const ConstructionReport& report, bool pretty = false);

struct Construction {
    NonuniformMachine machine;
    ConstructionReport report;
};

struct UniformConstruction {
    UniformTwoWayMachine machine;
    ConstructionReport report;
};

// Deterministic nonuniform machine for the two-round address-chain function
// on n variables with modulus parameter t; stays within 13t+4 states.
Construction build_saf_2da(int t, int n);

// Uniform 2DFA for the mark-interleaved variant; correct on well-formed,
// exactly tiled inputs (n a multiple of 2t * block width).
UniformConstruction build_usaf_2dfa(int t);

// Deterministic nonuniform machine for the pairwise-comparison function,
// using the interleaving input shuffle; at most 6 states.
Construction build_eq_shuffled(int n);

}  // namespace twa
