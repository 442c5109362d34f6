// Exact simulators: deterministic runs with a pigeonhole divergence bound,
// nondeterministic acceptance by configuration-graph reachability,
// probabilistic acceptance/expected time by absorbing-chain linear solves,
// the uniform 2DFA runner, a compiled fast path for exhaustive enumeration,
// and a seeded Monte-Carlo sampler.
#pragma once

#include <cstdint>
#include <vector>

#include "machine.hpp"
#include "rng.hpp"

namespace twa {

enum class Verdict { accept, reject, diverge };

const char* verdict_name(Verdict v);

struct RunOutcome {
    Verdict verdict = Verdict::diverge;
    long steps = -1;  // -1 when diverging
};

struct TraceEntry {
    int state;  // 0-based
    int pos;    // 0-based tape square (uniform runner: 0 = left endmarker)
};

// Deterministic run from (initial, square 1); applies the shuffle if present.
// Diverge after num_states*n + 1 steps (some configuration repeated).
RunOutcome run_deterministic(const NonuniformMachine& m, const Word& w,
                             std::vector<TraceEntry>* trace = nullptr);

// Accept iff an accepting configuration is reachable in the graph induced by
// w; paths that die or loop do not accept.
Verdict run_nondeterministic(const NonuniformMachine& m, const Word& w);

struct AcceptanceProbability {
    double accept = 0.0;
    double reject = 0.0;
    double nonhalting = 0.0;
    bool solver_warning = false;  // linear-solve residual above 1e-8
};

// Absorbing-chain analysis over configurations; configurations that cannot
// reach a halting configuration contribute to nonhalting.
AcceptanceProbability acceptance_probability(const NonuniformMachine& m, const Word& w);

struct ExpectedTime {
    bool infinite = false;
    double value = 0.0;
};

// Expected steps to absorption from the start configuration; infinite when
// the nonhalting mass exceeds 1e-9.
ExpectedTime expected_running_time(const NonuniformMachine& m, const Word& w);

enum class Decision { accept, reject, undecided };

const char* decision_name(Decision d);

// Accept if acceptance >= 1/2+eps, Reject if rejection >= 1/2+eps.
Decision decide_probabilistic(const NonuniformMachine& m, const Word& w, double eps);

// Runs on the tape <w> (squares 0..n+1); diverges after num_states*(n+2)+1
// steps. Deterministic machines only.
RunOutcome run_uniform_2dfa(const UniformTwoWayMachine& m, const Word& w,
                            std::vector<TraceEntry>* trace = nullptr);

// One sampled trajectory of a prob machine; diverge when step_cap is hit.
RunOutcome sample_run(const NonuniformMachine& m, const Word& w, Xoshiro256& rng,
                      long step_cap);

// Flat-table deterministic runner for masked words (n <= 64); used by the
// exhaustive verification loops. from_square folds the shuffle in: the symbol
// seen at square p is bit from_square[p] of the raw input mask.
struct CompiledDet {
    int n = 0;
    int num_states = 0;
    int initial = 0;
    int accept = 0;
    int reject = 0;
    long step_bound = 0;
    std::vector<int32_t> next;      // (pos*num_states+state)*2+sym -> state
    std::vector<int8_t> dpos;       // same index -> head displacement
    std::vector<int32_t> from_square;

    // steps receives the step count for halting runs.
    Verdict run(uint64_t mask, long* steps = nullptr) const;
};

CompiledDet compile_deterministic(const NonuniformMachine& m);

}  // namespace twa
