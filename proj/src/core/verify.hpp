// Machine-versus-oracle verification: exhaustive or seeded sampled sweeps,
// deterministic under any worker count, with minimized counterexamples.
// Also hosts the seeded random-machine generators used for stress testing.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "machine.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "witness.hpp"

namespace twa {

struct VerifyPlan {
    uint64_t samples = 0;  // 0 = exhaustive (needs n <= 26)
    uint64_t seed = 0;
    int jobs = 1;  // < 1 = one worker per hardware thread
};

struct Counterexample {
    std::string input;  // bit string, after minimization
    int expected = 0;   // oracle value on the minimized input
    std::string got;    // "0" | "1" | "diverge" | "undecided"
};

struct VerifyReport {
    std::string mode;  // "exhaustive" | "sampled"
    uint64_t total = 0;
    uint64_t mismatches = 0;
    uint64_t diverges = 0;
    long max_steps = 0;  // deterministic runners only
    uint64_t seed = 0;
    bool pass = false;  // mismatches == 0 and diverges == 0
    double seconds = 0.0;
    std::vector<Counterexample> counterexamples;  // at most 100, minimized
};

// Fills a word from the chunk's random stream.
using InputSampler = std::function<void(Xoshiro256&, Word&)>;

InputSampler uniform_sampler();

// Keeps the mark bits of every block fixed at their well-formed values and
// draws only payload squares (trailing remainder squares stay uniform).
InputSampler usaf_wellformed_sampler(const UsafParams& params);

// Clearing a set bit must keep the input inside the machine's contract for a
// counterexample to stay meaningful; the minimizer consults this.
using DomainFilter = std::function<bool(const Word&)>;

DomainFilter accept_all_inputs();
DomainFilter usaf_wellformed_filter(const UsafParams& params);

// Sweeps machine vs oracle. Exhaustive mode walks masks in ascending order;
// sampled mode draws from `sampler`. Work is cut into fixed-size chunks with
// per-chunk substreams, so the report (including the counterexample list) is
// byte-identical no matter how many workers run. Probabilistic machines are
// decided with margin eps = 1/5; undecided counts as a mismatch.
VerifyReport run_verify(const AnyMachine& machine, const FunctionOracle& oracle,
                        const VerifyPlan& plan,
                        const InputSampler& sampler = uniform_sampler(),
                        const DomainFilter& domain = accept_all_inputs());

// Seeded generators for stress machines. Boundary rules are respected (no
// left move on square 1, no blind right move on square n, halting targets
// only on square n); probabilistic rows are normalized to sum to 1 exactly.
NonuniformMachine random_machine(MachineKind kind, int n, int num_states, uint64_t seed);

// First `count` substreams of `seed` whose deterministic machine halts on
// every input; n <= 20. Candidates are drawn with a rightward/halting bias
// (uniform draws essentially never produce total machines past n = 4).
std::vector<NonuniformMachine> random_total_det_machines(int n, int num_states,
                                                         uint64_t seed, int count);

}  // namespace twa
