// Absorbing-chain analysis: acceptance/expected-time solves, multiplicative
// closeness predicates, input-splitting crossing matrices with their boundary
// identity, and the robustness-lemma checker.
#pragma once

#include <string>
#include <vector>

#include "machine.hpp"

namespace twa {

// Row-stochastic chain over states 1..m with start 1, reject m-1, accept m
// (stored 0-based: start 0, reject m-2, accept m-1; both absorbing).
struct AbsorbingChain {
    int m = 0;
    std::vector<double> p;  // m*m, row-major

    static AbsorbingChain zero(int m);
    double at(int i, int j) const { return p[static_cast<size_t>(i) * m + j]; }
    double& at(int i, int j) { return p[static_cast<size_t>(i) * m + j]; }
    int reject_state() const { return m - 2; }
    int accept_state() const { return m - 1; }
};

// Violation messages: needs m >= 3, entries >= 0, rows summing to 1 within
// 1e-12, and point masses on the two absorbing rows.
std::vector<std::string> validate_chain(const AbsorbingChain& c);

// Probability of absorption in the accept state from the start state; states
// that cannot reach absorption contribute nothing.
double absorption_probability(const AbsorbingChain& c);

struct AbsorptionTime {
    bool infinite = false;
    double value = 0.0;  // counts the absorbing step: immediate absorption is 1
};

// Expected steps to absorption; infinite when the absorption probability
// falls short of 1 by more than 1e-9.
AbsorptionTime expected_absorption_time(const AbsorbingChain& c);

// Multiplicative beta-closeness of two probabilities (beta >= 1): both zero,
// or both positive with ratio within [1/beta, beta].
bool beta_close(double p, double pp, double beta);

// Closeness modulo a floor lambda >= 0: both below the floor, or both at or
// above it and beta-close.
bool beta_close_mod_lambda(double p, double pp, double beta, double lambda);

// Entrywise beta_close_mod_lambda over two equal-size chains.
bool chains_beta_close_mod_lambda(const AbsorbingChain& a, const AbsorbingChain& b,
                                  double beta, double lambda);

// Crossing matrix for the boundary between squares u and u+1 (u in [1, n-1]):
// dimension 2d+3 with rows/cols b_0 = (initial, square 1), b_1..b_d =
// (state s_i, square u), b_{d+1}/b_{d+2} = accept/reject at square n, and
// b_{d+3+j} = (state s_{j+1}, square u+1). Left-side rows carry first-passage
// probabilities into the right-entry block; right-side rows carry returns to
// the boundary or halting; the two halting rows are point masses.
struct CrossingMatrix {
    int d = 0;      // machine state count (halting states included)
    int dim = 0;    // 2d+3
    int split = 0;  // u, 1-based
    std::vector<double> entries;  // dim*dim, row-major

    double at(int i, int j) const { return entries[static_cast<size_t>(i) * dim + j]; }
    double& at(int i, int j) { return entries[static_cast<size_t>(i) * dim + j]; }
};

struct BoundaryVectors {
    std::vector<double> start;   // e_0
    std::vector<double> accept;  // e_{d+1}
};

// Deterministic and probabilistic machines only; the shuffle, if any, is
// applied to w first. The initial state must be non-halting.
CrossingMatrix crossing_matrix(const NonuniformMachine& m, const Word& w, int u,
                               BoundaryVectors* vectors = nullptr);

struct CrossingReport {
    int split = 0;
    double simulator_accept = 0.0;  // acceptance_probability on the whole tape
    double crossing_accept = 0.0;   // absorption into b_{d+1} of the crossing chain
    double power_accumulated = 0.0; // start * M^t * accept at t = t_used
    long t_used = 0;
    double tol = 0.0;
    bool agreed = false;     // |crossing_accept - simulator_accept| <= tol
    bool converged = false;  // |power_accumulated - crossing_accept| <= tol
};

// Checks that first-passage acceptance through the split-u boundary matches
// the direct absorbing-chain acceptance. Power accumulation runs for up to
// 10*d*n steps; failure to converge is reported, not an error.
CrossingReport verify_crossing_identity(const NonuniformMachine& m, const Word& w,
                                        int u, double tol);

struct BetaCloseReport {
    bool precondition_ok = false;   // a(P) >= 1/2 + eps
    double a_p = 0.0;
    double a_pprime = 0.0;
    double t_used = 0.0;            // max(T(P), T(P'), m)
    double lambda = 0.0;            // eps^2 / (256 T^3)
    double beta = 0.0;              // ((1+eps+eps^2)/(1+eps))^(1/(2m))
    bool gate_holds = false;        // chains beta-close mod lambda
    double intermediate = 0.0;      // (1-2 lambda m^3) beta^(-2m) a(P) - 4 sqrt(lambda m T)
    bool conclusion_holds = false;  // a(P') >= 1/2 + eps/4, evaluated when the gate holds
    double margin = 0.0;            // a(P') - (1/2 + eps/4)
};

// Robustness check: if P' is beta-close mod lambda to P (parameters derived
// from eps, the chain size, and the worst expected time), a clearly accepting
// P carries over to P'. Throws when either chain never halts.
BetaCloseReport check_betaclose_lemma(const AbsorbingChain& P, const AbsorbingChain& Pp,
                                      double eps);

}  // namespace twa
