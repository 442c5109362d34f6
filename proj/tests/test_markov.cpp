// Absorbing-chain solves, closeness predicates, crossing matrices, and the
// robustness-lemma checker.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/machine.hpp"
#include "core/markov.hpp"
#include "core/construct.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/verify.hpp"

using namespace twa;

namespace {

AbsorbingChain chain3(double stay, double rej, double acc) {
    AbsorbingChain c = AbsorbingChain::zero(3);
    c.at(0, 0) = stay;
    c.at(0, 1) = rej;
    c.at(0, 2) = acc;
    c.at(1, 1) = 1.0;
    c.at(2, 2) = 1.0;
    return c;
}

}  // namespace

TEST_CASE("absorption probability and time on hand-solved chains") {
    // Start keeps mass 0.5, rejects 0.2, accepts 0.3: a = 0.3/0.5 = 0.6 and
    // the expected time is 1/0.5 = 2 (the absorbing step counts).
    const AbsorbingChain c = chain3(0.5, 0.2, 0.3);
    CHECK(validate_chain(c).empty());
    CHECK(absorption_probability(c) == doctest::Approx(0.6).epsilon(1e-12));
    const AbsorptionTime t = expected_absorption_time(c);
    CHECK_FALSE(t.infinite);
    CHECK(t.value == doctest::Approx(2.0).epsilon(1e-12));

    // Immediate absorption takes exactly one step.
    const AbsorbingChain imm = chain3(0.0, 0.4, 0.6);
    CHECK(absorption_probability(imm) == doctest::Approx(0.6));
    CHECK(expected_absorption_time(imm).value == doctest::Approx(1.0));

    // A start state that never leaves itself is never absorbed.
    const AbsorbingChain stuck = chain3(1.0, 0.0, 0.0);
    CHECK(absorption_probability(stuck) == doctest::Approx(0.0));
    CHECK(expected_absorption_time(stuck).infinite);
}

TEST_CASE("chain validation pins its messages") {
    AbsorbingChain c = AbsorbingChain::zero(2);
    CHECK(validate_chain(c).front() ==
          "chain needs at least 3 states (start plus two absorbing)");

    AbsorbingChain neg = chain3(0.5, 0.2, 0.3);
    neg.at(0, 1) = -0.2;
    neg.at(0, 0) = 0.9;
    bool found = false;
    for (const auto& v : validate_chain(neg))
        if (v == "negative entry at row 1, column 2") found = true;
    CHECK(found);

    AbsorbingChain short_row = chain3(0.5, 0.2, 0.2);
    CHECK(validate_chain(short_row).front() == "row 1 sums to 0.9, not 1");

    AbsorbingChain leaky = chain3(0.5, 0.2, 0.3);
    leaky.at(2, 2) = 0.0;
    leaky.at(2, 0) = 1.0;
    CHECK(validate_chain(leaky).front() ==
          "absorbing row 3 is not a point mass on itself");
}

TEST_CASE("closeness predicates") {
    CHECK(beta_close(0.0, 0.0, 2.0));
    CHECK(beta_close(0.2, 0.3, 2.0));
    CHECK(beta_close(0.3, 0.2, 2.0));
    CHECK_FALSE(beta_close(0.1, 0.3, 2.0));
    CHECK_FALSE(beta_close(0.0, 0.1, 2.0));  // zero vs positive
    CHECK_FALSE(beta_close(0.1, 0.0, 2.0));
    CHECK_THROWS_AS((void)beta_close(0.1, 0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)beta_close(-0.1, 0.1, 2.0), std::invalid_argument);

    CHECK(beta_close_mod_lambda(0.001, 0.005, 2.0, 0.01));   // both below the floor
    CHECK(beta_close_mod_lambda(0.02, 0.03, 2.0, 0.01));     // both above, close
    CHECK_FALSE(beta_close_mod_lambda(0.001, 0.5, 2.0, 0.01));
    CHECK_FALSE(beta_close_mod_lambda(0.02, 0.09, 2.0, 0.01));
    CHECK_THROWS_AS((void)beta_close_mod_lambda(0.1, 0.1, 2.0, -0.1),
                    std::invalid_argument);

    const AbsorbingChain a = chain3(0.5, 0.2, 0.3);
    const AbsorbingChain b = chain3(0.5, 0.25, 0.25);
    CHECK(chains_beta_close_mod_lambda(a, b, 2.0, 0.0));
    CHECK_FALSE(chains_beta_close_mod_lambda(a, b, 1.05, 0.0));
    AbsorbingChain wide = AbsorbingChain::zero(4);
    CHECK_THROWS_AS((void)chains_beta_close_mod_lambda(a, wide, 2.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("crossing matrix shape and halting rows") {
    const Construction saf = build_saf_2da(2, 25);
    const int d = saf.machine.num_states;
    Xoshiro256 rng(31);
    Word w(25, 0);
    for (auto& b : w) b = rng.coin();

    BoundaryVectors vecs;
    const CrossingMatrix M = crossing_matrix(saf.machine, w, 13, &vecs);
    CHECK(M.d == d);
    CHECK(M.dim == 2 * d + 3);
    CHECK(M.split == 13);
    REQUIRE(static_cast<int>(vecs.start.size()) == M.dim);
    CHECK(vecs.start[0] == 1.0);
    CHECK(vecs.accept[d + 1] == 1.0);

    for (int i = 0; i < M.dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < M.dim; ++j) {
            CHECK(M.at(i, j) >= 0.0);
            row += M.at(i, j);
        }
        CHECK(row <= 1.0 + 1e-9);  // substochastic: diverging mass may vanish
    }
    // The two halting rows are point masses on themselves.
    for (int h : {d + 1, d + 2}) {
        for (int j = 0; j < M.dim; ++j)
            CHECK(M.at(h, j) == (j == h ? 1.0 : 0.0));
    }
    // Left-side rows can only enter the right-entry block (or halt at the
    // right end after crossing): columns b_1..b_d stay empty.
    for (int i = 0; i <= d; ++i)
        for (int j = 1; j <= d; ++j) CHECK(M.at(i, j) == 0.0);

    CHECK_THROWS_AS((void)crossing_matrix(saf.machine, w, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)crossing_matrix(saf.machine, w, 25), std::invalid_argument);
    const NonuniformMachine nm = random_machine(MachineKind::nondet, 4, 4, 1);
    CHECK_THROWS_AS((void)crossing_matrix(nm, Word(4, 0), 2), std::invalid_argument);
}

TEST_CASE("crossing identity holds for random probabilistic machines") {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        const NonuniformMachine m = random_machine(MachineKind::prob, 4, 4, seed);
        Xoshiro256 rng(seed * 17);
        Word w(4, 0);
        for (auto& b : w) b = rng.coin();
        for (int u = 1; u <= 3; ++u) {
            const CrossingReport rep = verify_crossing_identity(m, w, u, 1e-6);
            CHECK(rep.agreed);
            CHECK(rep.converged);
            CHECK(rep.simulator_accept ==
                  doctest::Approx(acceptance_probability(m, w).accept).epsilon(1e-12));
        }
    }
}

TEST_CASE("crossing identity holds for a deterministic builder machine") {
    const Construction saf = build_saf_2da(2, 25);
    const Word w = Word(25, 1);
    for (int u : {1, 7, 13, 24}) {
        const CrossingReport rep = verify_crossing_identity(saf.machine, w, u, 1e-6);
        CHECK(rep.agreed);
        CHECK(rep.converged);
    }
}

TEST_CASE("power accumulation grows monotonically to the solve") {
    const NonuniformMachine m = random_machine(MachineKind::prob, 4, 4, 9);
    const Word w{1, 0, 1, 1};
    BoundaryVectors vecs;
    const CrossingMatrix M = crossing_matrix(m, w, 2, &vecs);
    std::vector<double> v = vecs.start;
    double prev = 0.0;
    for (int t = 0; t < 400; ++t) {
        std::vector<double> next(v.size(), 0.0);
        for (int i = 0; i < M.dim; ++i) {
            if (v[static_cast<size_t>(i)] == 0.0) continue;
            for (int j = 0; j < M.dim; ++j)
                next[static_cast<size_t>(j)] += v[static_cast<size_t>(i)] * M.at(i, j);
        }
        v = std::move(next);
        const double acc = v[static_cast<size_t>(M.d + 1)];
        CHECK(acc >= prev - 1e-15);
        prev = acc;
    }
    const CrossingReport rep = verify_crossing_identity(m, w, 2, 1e-6);
    CHECK(prev <= rep.crossing_accept + 1e-9);
}

TEST_CASE("robustness lemma: identical chains and scaled perturbations pass") {
    const AbsorbingChain P = chain3(0.2, 0.1, 0.7);
    const double eps = 0.2;  // a(P) = 0.875 >= 0.7
    const BetaCloseReport self = check_betaclose_lemma(P, P, eps);
    CHECK(self.precondition_ok);
    CHECK(self.gate_holds);
    CHECK(self.a_p == doctest::Approx(0.875));
    CHECK(self.a_pprime == doctest::Approx(0.875));
    CHECK(self.conclusion_holds);
    CHECK(self.margin > 0.0);
    CHECK(self.beta > 1.0);
    CHECK(self.lambda > 0.0);

    // Perturb transient rows by factors within [beta^-1/2, beta^1/2].
    Xoshiro256 rng(123);
    AbsorbingChain Pp = P;
    for (int j = 0; j < 3; ++j)
        Pp.at(0, j) = P.at(0, j) * std::pow(self.beta, rng.uniform01() - 0.5);
    double sum = Pp.at(0, 0) + Pp.at(0, 1) + Pp.at(0, 2);
    for (int j = 0; j < 3; ++j) Pp.at(0, j) /= sum;
    const BetaCloseReport rep = check_betaclose_lemma(P, Pp, eps);
    CHECK(rep.gate_holds);
    CHECK(rep.conclusion_holds);
    CHECK(rep.margin >= 0.0);

    // A blatantly different chain fails the gate.
    const AbsorbingChain far = chain3(0.2, 0.7, 0.1);
    const BetaCloseReport bad = check_betaclose_lemma(P, far, eps);
    CHECK_FALSE(bad.gate_holds);

    CHECK_THROWS_AS((void)check_betaclose_lemma(P, P, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)check_betaclose_lemma(P, P, 0.6), std::invalid_argument);
    const AbsorbingChain stuck = chain3(1.0, 0.0, 0.0);
    CHECK_THROWS_WITH_AS(
        (void)check_betaclose_lemma(P, stuck, eps),
        "expected absorption time is infinite; the robustness check needs halting chains",
        std::invalid_argument);
}
