// Deterministic chunked verification sweeps and seeded machine generators.
#include "verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <stdexcept>
#include <thread>
#include <variant>

#include "bits.hpp"
#include "simulate.hpp"

namespace twa {
namespace {

constexpr uint64_t kChunkSize = 1u << 16;
constexpr int kMaxExhaustiveBits = 26;
constexpr size_t kMaxCounterexamples = 100;
constexpr double kDecisionMargin = 0.2;

// Machine value on one input: 1 accept, 0 reject, -1 diverge, -2 undecided.
struct Evaluation {
    int value = 0;
    long steps = 0;
};

struct Evaluator {
    const NonuniformMachine* nm = nullptr;
    const UniformTwoWayMachine* um = nullptr;
    const CompiledDet* compiled = nullptr;

    Evaluation eval_mask_fast(uint64_t mask) const {  // compiled path only
        long steps = 0;
        Verdict v = compiled->run(mask, &steps);
        return {v == Verdict::diverge ? -1 : v == Verdict::accept ? 1 : 0, steps};
    }

    Evaluation eval_word(const Word& w) const {
        if (compiled) return eval_mask_fast(word_to_mask(w));
        if (um) {
            RunOutcome out = run_uniform_2dfa(*um, w);
            return {out.verdict == Verdict::diverge ? -1
                    : out.verdict == Verdict::accept ? 1
                                                     : 0,
                    std::max(out.steps, 0L)};
        }
        switch (nm->kind) {
            case MachineKind::det: {
                RunOutcome out = run_deterministic(*nm, w);
                return {out.verdict == Verdict::diverge ? -1
                        : out.verdict == Verdict::accept ? 1
                                                         : 0,
                        std::max(out.steps, 0L)};
            }
            case MachineKind::nondet:
                return {run_nondeterministic(*nm, w) == Verdict::accept ? 1 : 0, 0};
            case MachineKind::prob: {
                Decision d = decide_probabilistic(*nm, w, kDecisionMargin);
                return {d == Decision::accept ? 1 : d == Decision::reject ? 0 : -2, 0};
            }
        }
        return {-2, 0};
    }
};

const char* got_name(int value) {
    switch (value) {
        case 1: return "1";
        case 0: return "0";
        case -1: return "diverge";
        default: return "undecided";
    }
}

struct ChunkOut {
    uint64_t mismatches = 0;
    uint64_t diverges = 0;
    long max_steps = 0;
    std::vector<Word> bad;  // raw failing inputs, capped
};

// Greedy bit-clearing to a local minimum; a kept clearing must stay in the
// machine's input contract and still fail.
Word minimize_counterexample(Word w, const Evaluator& ev, const FunctionOracle& oracle,
                             const DomainFilter& domain) {
    auto fails = [&](const Word& x) {
        Evaluation e = ev.eval_word(x);
        return e.value < 0 || e.value != oracle.eval(x);
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t j = 0; j < w.size(); ++j) {
            if (!w[j]) continue;
            w[j] = 0;
            if (domain(w) && fails(w)) {
                changed = true;
            } else {
                w[j] = 1;
            }
        }
    }
    return w;
}

}  // namespace

InputSampler uniform_sampler() {
    return [](Xoshiro256& rng, Word& w) {
        for (auto& b : w) b = rng.coin() ? 1 : 0;
    };
}

// Fixed mark layout of a well-formed input: square 2j of each block holds 0
// for the c address payloads and 1 afterwards; payloads and any trailing
// remainder squares are free.
static std::vector<int8_t> usaf_fixed_pattern(const UsafParams& pr) {
    std::vector<int8_t> fixed(static_cast<size_t>(pr.n), -1);
    for (int p = 0; p < 2 * pr.t; ++p) {
        const int base = p * pr.q;
        for (int j = 0; j < pr.q / 2; ++j)
            fixed[static_cast<size_t>(base + 2 * j)] = j < pr.c ? 0 : 1;
    }
    return fixed;
}

InputSampler usaf_wellformed_sampler(const UsafParams& params) {
    auto fixed = usaf_fixed_pattern(params);
    return [fixed](Xoshiro256& rng, Word& w) {
        for (size_t j = 0; j < w.size(); ++j)
            w[j] = fixed[j] >= 0 ? static_cast<uint8_t>(fixed[j]) : (rng.coin() ? 1 : 0);
    };
}

DomainFilter accept_all_inputs() {
    return [](const Word&) { return true; };
}

DomainFilter usaf_wellformed_filter(const UsafParams& params) {
    auto fixed = usaf_fixed_pattern(params);
    return [fixed](const Word& w) {
        for (size_t j = 0; j < w.size(); ++j)
            if (fixed[j] >= 0 && w[j] != static_cast<uint8_t>(fixed[j])) return false;
        return true;
    };
}

VerifyReport run_verify(const AnyMachine& machine, const FunctionOracle& oracle,
                        const VerifyPlan& plan, const InputSampler& sampler,
                        const DomainFilter& domain) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = oracle.arity();

    Evaluator ev;
    CompiledDet compiled;
    if (const auto* nm = std::get_if<NonuniformMachine>(&machine)) {
        auto bad = validate_machine(*nm);
        if (!bad.empty()) throw std::invalid_argument(bad.front().format());
        if (nm->n != n)
            throw std::invalid_argument("oracle arity does not match the machine input length");
        ev.nm = nm;
        if (nm->kind == MachineKind::det && n <= 64) {
            compiled = compile_deterministic(*nm);
            ev.compiled = &compiled;
        }
    } else {
        const auto* um = std::get_if<UniformTwoWayMachine>(&machine);
        auto bad = validate_uniform(*um);
        if (!bad.empty()) throw std::invalid_argument(bad.front().format());
        if (um->kind != MachineKind::det)
            throw std::invalid_argument("uniform verification supports deterministic machines");
        ev.um = um;
    }

    VerifyReport rep;
    rep.seed = plan.seed;
    const bool exhaustive = plan.samples == 0;
    rep.mode = exhaustive ? "exhaustive" : "sampled";
    if (exhaustive && n > kMaxExhaustiveBits)
        throw std::invalid_argument("exhaustive verification supports n <= 26; use --samples");
    rep.total = exhaustive ? (uint64_t{1} << n) : plan.samples;

    const uint64_t num_chunks = (rep.total + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkOut> outs(static_cast<size_t>(num_chunks));

    auto run_chunk = [&](uint64_t k) {
        ChunkOut out;
        auto record = [&](int value, long steps, const Word& w, int expected) {
            out.max_steps = std::max(out.max_steps, steps);
            const bool diverged = value == -1;
            const bool wrong = value != expected;
            if (diverged) ++out.diverges;
            if (wrong && !diverged) ++out.mismatches;
            if ((diverged || wrong) && out.bad.size() < kMaxCounterexamples)
                out.bad.push_back(w);
        };
        const uint64_t lo = k * kChunkSize;
        const uint64_t hi = std::min(rep.total, lo + kChunkSize);
        if (exhaustive) {
            for (uint64_t mask = lo; mask < hi; ++mask) {
                const int expected = oracle.eval_mask(mask);
                if (ev.compiled) {
                    Evaluation e = ev.eval_mask_fast(mask);
                    if (e.value == expected) {
                        out.max_steps = std::max(out.max_steps, e.steps);
                        continue;
                    }
                    record(e.value, e.steps, mask_to_word(mask, n), expected);
                } else {
                    const Word w = mask_to_word(mask, n);
                    Evaluation e = ev.eval_word(w);
                    record(e.value, e.steps, w, expected);
                }
            }
        } else {
            Xoshiro256 rng(substream_seed(plan.seed, k));
            Word w(static_cast<size_t>(n));
            for (uint64_t i = lo; i < hi; ++i) {
                sampler(rng, w);
                Evaluation e = ev.eval_word(w);
                record(e.value, e.steps, w, oracle.eval(w));
            }
        }
        outs[static_cast<size_t>(k)] = std::move(out);
    };

    int jobs = plan.jobs >= 1 ? plan.jobs
                              : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<int>(std::min<uint64_t>(jobs, num_chunks));
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const uint64_t k = next.fetch_add(1);
            if (k >= num_chunks) return;
            run_chunk(k);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<Word> bad;
    for (const auto& out : outs) {
        rep.mismatches += out.mismatches;
        rep.diverges += out.diverges;
        rep.max_steps = std::max(rep.max_steps, out.max_steps);
        for (const auto& w : out.bad) {
            if (bad.size() >= kMaxCounterexamples) break;
            bad.push_back(w);
        }
    }
    std::set<std::string> seen;
    for (const auto& w : bad) {
        const Word small = minimize_counterexample(w, ev, oracle, domain);
        std::string text = word_to_string(small);
        if (!seen.insert(text).second) continue;
        Evaluation e = ev.eval_word(small);
        rep.counterexamples.push_back({std::move(text), oracle.eval(small), got_name(e.value)});
    }
    rep.pass = rep.mismatches == 0 && rep.diverges == 0;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

NonuniformMachine random_machine(MachineKind kind, int n, int num_states, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("input length must be at least 1");
    if (num_states < 3) throw std::invalid_argument("need at least 3 states");
    const int accept = num_states - 2;
    const int reject = num_states - 1;
    NonuniformMachine m = NonuniformMachine::make(kind, n, num_states, 0, accept, reject);
    Xoshiro256 rng(seed);
    std::vector<std::pair<int, HeadMove>> cand;
    for (int pos = 0; pos < n; ++pos) {
        for (int s = 0; s < accept; ++s) {
            for (int sym = 0; sym < 2; ++sym) {
                cand.clear();
                for (int t = 0; t < accept; ++t) {
                    if (pos > 0) cand.push_back({t, HeadMove::left});
                    cand.push_back({t, HeadMove::stay});
                    if (pos < n - 1) cand.push_back({t, HeadMove::right});
                }
                if (pos == n - 1) {
                    cand.push_back({accept, HeadMove::stay});
                    cand.push_back({reject, HeadMove::stay});
                }
                TargetList& row = m.at(pos, s, sym);
                switch (kind) {
                    case MachineKind::det: {
                        auto [ts, mv] = cand[rng.below(cand.size())];
                        row.push_back({ts, mv, 1.0});
                        break;
                    }
                    case MachineKind::nondet: {
                        const uint64_t k = rng.below(3);
                        std::set<size_t> picked;
                        while (picked.size() < k) picked.insert(rng.below(cand.size()));
                        for (size_t idx : picked)
                            row.push_back({cand[idx].first, cand[idx].second, 1.0});
                        break;
                    }
                    case MachineKind::prob: {
                        const int k = 1 + static_cast<int>(rng.below(3));
                        std::vector<double> wts(static_cast<size_t>(k));
                        double total = 0.0;
                        for (auto& x : wts) total += (x = 0.1 + rng.uniform01());
                        double used = 0.0;
                        for (int i = 0; i < k; ++i) {
                            auto [ts, mv] = cand[rng.below(cand.size())];
                            const double p = i + 1 == k ? 1.0 - used
                                                        : wts[static_cast<size_t>(i)] / total;
                            used += p;
                            row.push_back({ts, mv, p});
                        }
                        break;
                    }
                }
            }
        }
    }
    return m;
}

namespace {

// Deterministic candidate with a rightward/halting bias. Uniform candidates
// almost always loop on some input once n reaches 5, so the totality filter
// below would reject essentially everything; biasing the draw keeps the
// machines varied while making total ones common.
NonuniformMachine biased_det_candidate(int n, int num_states, uint64_t seed) {
    const int accept = num_states - 2;
    const int reject = num_states - 1;
    NonuniformMachine m =
        NonuniformMachine::make(MachineKind::det, n, num_states, 0, accept, reject);
    Xoshiro256 rng(seed);
    for (int pos = 0; pos < n; ++pos) {
        for (int s = 0; s < accept; ++s) {
            for (int sym = 0; sym < 2; ++sym) {
                int target = static_cast<int>(rng.below(static_cast<uint64_t>(accept)));
                HeadMove mv;
                if (pos == n - 1) {
                    const double roll = rng.uniform01();
                    if (roll < 0.5) {
                        target = rng.coin() ? accept : reject;
                        mv = HeadMove::stay;
                    } else {
                        mv = roll < 0.9 ? HeadMove::left : HeadMove::stay;
                    }
                } else if (pos == 0) {
                    mv = rng.uniform01() < 0.8 ? HeadMove::right : HeadMove::stay;
                } else {
                    const double roll = rng.uniform01();
                    mv = roll < 0.6 ? HeadMove::right
                                    : (roll < 0.85 ? HeadMove::left : HeadMove::stay);
                }
                m.at(pos, s, sym).push_back({target, mv, 1.0});
            }
        }
    }
    return m;
}

}  // namespace

std::vector<NonuniformMachine> random_total_det_machines(int n, int num_states,
                                                         uint64_t seed, int count) {
    if (n > 20) throw std::invalid_argument("totality filtering supports n <= 20");
    std::vector<NonuniformMachine> out;
    for (uint64_t trial = 0; static_cast<int>(out.size()) < count; ++trial) {
        if (trial > 200000) throw std::runtime_error("could not find enough total machines");
        NonuniformMachine m =
            biased_det_candidate(n, num_states, substream_seed(seed, trial));
        const CompiledDet c = compile_deterministic(m);
        bool total = true;
        for (uint64_t mask = 0; mask < (uint64_t{1} << n) && total; ++mask)
            total = c.run(mask) != Verdict::diverge;
        if (total) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace twa
