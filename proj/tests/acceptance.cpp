// Acceptance harness: end-to-end checks of the shipped claims, one line per
// check. Exits 0 iff every check passes. Unlike the unit tests, these runs
// use production-scale workloads (full 2^25 enumeration, 10^6 samples, ...)
// and enforce the wall-clock budgets the claims come with.
#include <gmpxx.h>

#include <chrono>
#include <cinttypes>
#include <cstdarg>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "core/bounds.hpp"
#include "core/construct.hpp"
#include "core/machine.hpp"
#include "core/markov.hpp"
#include "core/measures.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "core/simulate.hpp"
#include "core/verify.hpp"
#include "core/witness.hpp"

using namespace twa;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// 1. The 30-state SAF machine for t=2, n=25 agrees with the reference
//    evaluator on every one of the 2^25 inputs, within 10 minutes.
Outcome check_saf_exhaustive() {
    const auto t0 = std::chrono::steady_clock::now();
    const Construction c = build_saf_2da(2, 25);
    const auto oracle = make_saf_oracle(2, 25);
    VerifyPlan plan;
    plan.samples = 0;  // exhaustive
    plan.jobs = 0;     // one worker per hardware thread
    const VerifyReport rep = run_verify(AnyMachine{c.machine}, *oracle, plan);
    const double secs = seconds_since(t0);
    const bool pass = c.report.actual_states <= 30 && rep.pass && rep.mismatches == 0 &&
                      rep.diverges == 0 && rep.total == (1ull << 25) && secs <= 600.0;
    return {pass, fmt("states %d/30, %" PRIu64 " inputs, %" PRIu64 " mismatches, %" PRIu64
                      " diverges, %.1fs (budget 600s)",
                      c.report.actual_states, rep.total, rep.mismatches, rep.diverges, secs)};
}

// 2. The uniform USAF machine for t=2 stays within 66 states and agrees with
//    the reference evaluator on 10^6 seeded well-formed inputs of length 56,
//    within 2 minutes.
Outcome check_usaf_sampled() {
    const auto t0 = std::chrono::steady_clock::now();
    const UniformConstruction u = build_usaf_2dfa(2);
    const UsafParams pr = usaf_params(56, 2);
    const auto oracle = make_usaf_oracle(2, 56);
    VerifyPlan plan;
    plan.samples = 1000000;
    plan.seed = 2026;
    plan.jobs = 0;
    const VerifyReport rep = run_verify(AnyMachine{u.machine}, *oracle, plan,
                                        usaf_wellformed_sampler(pr), usaf_wellformed_filter(pr));
    const double secs = seconds_since(t0);
    const bool pass = u.report.actual_states <= 66 && rep.pass && rep.mismatches == 0 &&
                      rep.diverges == 0 && rep.total == 1000000 && secs <= 120.0;
    return {pass, fmt("states %d/66, %" PRIu64 " samples, %" PRIu64 " mismatches, %" PRIu64
                      " diverges, %.1fs (budget 120s)",
                      u.report.actual_states, rep.total, rep.mismatches, rep.diverges, secs)};
}

// 3. EQ subfunction facts: under the identity order the maximum subfunction
//    count is exactly 2^(n/2) for n in {4,...,12}; under the interleaving
//    order it is at most 4; exhaustive order search at n <= 8 finds <= 4.
Outcome check_eq_subfunctions() {
    bool pass = true;
    std::string detail;
    for (int n : {4, 6, 8, 10, 12}) {
        const auto eq = make_eq_oracle(n);
        const uint64_t nid = max_subfunctions(*eq, identity_order(n));
        VariableOrder inter(static_cast<size_t>(n));
        for (int k = 0; k < n / 2; ++k) {
            inter[static_cast<size_t>(2 * k)] = k;
            inter[static_cast<size_t>(2 * k + 1)] = n / 2 + k;
        }
        const uint64_t nint = max_subfunctions(*eq, inter);
        if (nid != (1ull << (n / 2)) || nint > 4) pass = false;
        detail += fmt("n=%d id=%" PRIu64 "/%llu interleaved=%" PRIu64 "; ", n, nid,
                      1ull << (n / 2), nint);
    }
    for (int n : {4, 6, 8}) {
        const auto eq = make_eq_oracle(n);
        const OrderSearchResult best = min_subfunctions_exhaustive(*eq);
        if (best.value > 4) pass = false;
        detail += fmt("best(n=%d)=%" PRIu64 "; ", n, best.value);
    }
    return {pass, detail};
}

// 4. The identity-order maximum subfunction count equals the prefix
//    equivalence-class count (and they agree split by split) for 50 seeded
//    random 8-variable functions and for EQ at n in {4,6,8}.
Outcome check_nerode_identity() {
    bool pass = true;
    int agreed = 0;
    for (uint64_t s = 0; s < 50; ++s) {
        Xoshiro256 rng(substream_seed(404, s));
        std::string bits(256, '0');
        for (char& b : bits) b = rng.coin() ? '1' : '0';
        const auto f = make_table_oracle(bits, 8);
        const bool ok = identity_order_mismatch_split(*f) == 0 &&
                        max_subfunctions(*f, identity_order(8)) == max_equivalence_classes(*f);
        pass = pass && ok;
        agreed += ok;
    }
    int eq_agreed = 0;
    for (int n : {4, 6, 8}) {
        const auto eq = make_eq_oracle(n);
        const bool ok = identity_order_mismatch_split(*eq) == 0 &&
                        max_subfunctions(*eq, identity_order(n)) == max_equivalence_classes(*eq);
        pass = pass && ok;
        eq_agreed += ok;
    }
    return {pass, fmt("random n=8 tables agreeing: %d/50, EQ sizes agreeing: %d/3", agreed,
                      eq_agreed)};
}

// 5. For seeded random machines that compute total functions (d=4 states,
//    n in {4,5,6}), the identity-order subfunction count of the computed
//    function respects the size bound of the machine's kind: (d+1)^(d+1)
//    deterministic, 2^((d+1)^2) nondeterministic. 21 machines per kind.
Outcome check_machine_lower_bounds() {
    const int d = 4;
    const mpz_class det_cap = det_size_bound(d);
    const mpz_class nondet_cap = nondet_size_bound(d);
    bool pass = true;
    int det_checked = 0, nondet_checked = 0;
    uint64_t worst_det = 0, worst_nondet = 0;
    for (int n : {4, 5, 6}) {
        const uint64_t rows = 1ull << n;
        for (const NonuniformMachine& m : random_total_det_machines(n, d, 500 + n, 7)) {
            std::string bits(rows, '0');
            for (uint64_t mask = 0; mask < rows; ++mask) {
                Word w(static_cast<size_t>(n));
                for (int j = 0; j < n; ++j) w[static_cast<size_t>(j)] = (mask >> (n - 1 - j)) & 1;
                const RunOutcome out = run_deterministic(m, w);
                if (out.verdict == Verdict::diverge) pass = false;
                bits[mask] = out.verdict == Verdict::accept ? '1' : '0';
            }
            const auto f = make_table_oracle(bits, n);
            const uint64_t nid = max_subfunctions(*f, identity_order(n));
            worst_det = std::max(worst_det, nid);
            if (mpz_class(nid) > det_cap) pass = false;
            ++det_checked;
        }
        for (uint64_t s = 0; s < 7; ++s) {
            const NonuniformMachine m =
                random_machine(MachineKind::nondet, n, d, substream_seed(600 + n, s));
            std::string bits(rows, '0');
            for (uint64_t mask = 0; mask < rows; ++mask) {
                Word w(static_cast<size_t>(n));
                for (int j = 0; j < n; ++j) w[static_cast<size_t>(j)] = (mask >> (n - 1 - j)) & 1;
                bits[mask] = run_nondeterministic(m, w) == Verdict::accept ? '1' : '0';
            }
            const auto f = make_table_oracle(bits, n);
            const uint64_t nid = max_subfunctions(*f, identity_order(n));
            worst_nondet = std::max(worst_nondet, nid);
            if (mpz_class(nid) > nondet_cap) pass = false;
            ++nondet_checked;
        }
    }
    pass = pass && det_checked >= 20 && nondet_checked >= 20;
    return {pass, fmt("det: %d machines, worst count %" PRIu64 " <= %s; nondet: %d machines, "
                      "worst count %" PRIu64 " <= %s",
                      det_checked, worst_det, det_cap.get_str().c_str(), nondet_checked,
                      worst_nondet, nondet_cap.get_str().c_str())};
}

// 6. The sampled subfunction lower bound certifies at least t^(t-2) = 3
//    distinct subfunctions for SAF with t=3, n=55 under the identity order,
//    using 10^4 prefixes and 64 probes at the middle split.
Outcome check_saf_sampled_bound() {
    const auto saf = make_saf_oracle(3, 55);
    const uint64_t lb =
        sampled_subfunction_lower_bound(*saf, identity_order(55), 27, 10000, 64, 11);
    return {lb >= 3, fmt("split 27, 10000 prefixes x 64 probes, seed 11: bound %" PRIu64
                         " >= 3",
                         lb)};
}

// 7. Probabilistic machinery on 20 seeded random machines (n <= 4, d = 3):
//    the exact acceptance probability matches a 10^5-run Monte Carlo estimate
//    within 0.02; the crossing-matrix acceptance agrees with the direct solve
//    within 1e-6 at every split; and on 10 seeded perturbation pairs the
//    robustness check holds with nonnegative margin.
Outcome check_probabilistic() {
    bool pass = true;
    double worst_mc = 0.0, worst_cross = 0.0;
    int crossings = 0;
    for (uint64_t s = 0; s < 20; ++s) {
        const int n = (s % 2) ? 4 : 3;
        const NonuniformMachine m = random_machine(MachineKind::prob, n, 3, substream_seed(700, s));
        Xoshiro256 wrng(substream_seed(701, s));
        Word w(static_cast<size_t>(n));
        for (auto& b : w) b = wrng.coin();
        const AcceptanceProbability ap = acceptance_probability(m, w);
        // Cap each trajectory well past the expected absorption time; slower
        // caps would bias the estimate downward on heavy-tailed machines.
        const ExpectedTime et = expected_running_time(m, w);
        const long cap = et.infinite ? 5000 : std::max(2000L, static_cast<long>(50.0 * et.value));
        Xoshiro256 mc(substream_seed(702, s));
        long acc = 0;
        for (int r = 0; r < 100000; ++r)
            acc += sample_run(m, w, mc, cap).verdict == Verdict::accept;
        const double gap = std::abs(static_cast<double>(acc) / 100000.0 - ap.accept);
        worst_mc = std::max(worst_mc, gap);
        if (gap > 0.02) pass = false;
        for (int u = 1; u < n; ++u) {
            const CrossingReport cr = verify_crossing_identity(m, w, u, 1e-6);
            const double cgap = std::abs(cr.crossing_accept - cr.simulator_accept);
            worst_cross = std::max(worst_cross, cgap);
            if (!cr.agreed || !cr.converged) pass = false;
            ++crossings;
        }
    }
    // Perturbation pairs: scale the transient rows of an accepting chain by
    // beta^u with u in [-1/4, 1/4] and renormalize; after renormalization
    // every entry ratio stays within [1/beta, beta], so the closeness gate
    // must hold and the accepting margin must survive.
    int pairs = 0;
    double worst_margin = 1.0;
    for (uint64_t s = 0; s < 400 && pairs < 10; ++s) {
        Xoshiro256 rng(substream_seed(808, s));
        AbsorbingChain P = AbsorbingChain::zero(4);
        for (int i = 0; i < 2; ++i) {
            double row[4], sum = 0.0;
            for (double& e : row) sum += e = 0.05 + rng.uniform01();
            row[3] += 4.0;
            sum += 4.0;
            for (int j = 0; j < 4; ++j) P.at(i, j) = row[j] / sum;
        }
        P.at(2, 2) = 1.0;
        P.at(3, 3) = 1.0;
        const BetaCloseReport base = check_betaclose_lemma(P, P, 0.2);
        if (!base.precondition_ok) continue;
        AbsorbingChain Q = P;
        Xoshiro256 prng(substream_seed(809, s));
        for (int i = 0; i < 2; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 4; ++j)
                sum += Q.at(i, j) = Q.at(i, j) * std::pow(base.beta, (prng.uniform01() - 0.5) / 2);
            for (int j = 0; j < 4; ++j) Q.at(i, j) /= sum;
        }
        const BetaCloseReport rep = check_betaclose_lemma(P, Q, 0.2);
        if (!rep.gate_holds || !rep.conclusion_holds || rep.margin < 0.0) pass = false;
        worst_margin = std::min(worst_margin, rep.margin);
        ++pairs;
    }
    if (pairs < 10) pass = false;
    return {pass, fmt("worst Monte Carlo gap %.4f <= 0.02 (20 machines), worst crossing gap "
                      "%.2e <= 1e-6 (%d splits), %d perturbation pairs, smallest margin %.4f",
                      worst_mc, worst_cross, crossings, pairs, worst_margin)};
}

// 8. Size-bound calculators: exact frozen values, and the full bound never
//    exceeding its simplified form for eps = 1/5 across d in [1,16] and
//    T in {2^8, 2^10, 2^16}.
Outcome check_bound_calculators() {
    bool pass = det_size_bound(4) == 3125 && nondet_size_bound(2) == 512;
    mpz_class expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 512, 9);
    pass = pass && prob_size_bound_simplified(2, 256) == expect;
    int dominated = 0;
    for (uint64_t T : {256ull, 1024ull, 65536ull})
        for (int d = 1; d <= 16; ++d) {
            if (prob_size_bound(d, T, 0.2) <= prob_size_bound_simplified(d, T)) ++dominated;
        }
    pass = pass && dominated == 48;
    return {pass, fmt("det(4)=%s, nondet(2)=%s, simplified(2,256)=512^9, full <= simplified at "
                      "%d/48 grid points",
                      det_size_bound(4).get_str().c_str(), nondet_size_bound(2).get_str().c_str(),
                      dominated)};
}

struct Criterion {
    const char* label;
    Outcome (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"saf machine, exhaustive n=25", check_saf_exhaustive},
        {"usaf machine, 10^6 samples at n=56", check_usaf_sampled},
        {"eq subfunction counts under three orders", check_eq_subfunctions},
        {"subfunction count equals prefix-class count", check_nerode_identity},
        {"machine size bounds dominate subfunction counts", check_machine_lower_bounds},
        {"sampled subfunction bound on saf t=3", check_saf_sampled_bound},
        {"probabilistic solves, crossing identity, robustness", check_probabilistic},
        {"size-bound calculator values", check_bound_calculators},
    };
    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, fmt("exception: %s", e.what())};
        }
        if (!out.pass) ++failures;
        printf("criterion %d (%s): %s — %s\n", idx, c.label, out.pass ? "PASS" : "FAIL",
               out.detail.c_str());
        fflush(stdout);
    }
    if (failures) printf("%d of 8 criteria failed\n", failures);
    else printf("all 8 criteria passed\n");
    return failures ? 1 : 0;
}
