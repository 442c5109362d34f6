// Absorbing-chain solves, closeness predicates, crossing-matrix construction,
// and the robustness-lemma checker.
#include "markov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "simulate.hpp"

namespace twa {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kHaltTol = 1e-9;
constexpr double kResidualTol = 1e-8;

using Edges = std::vector<std::vector<std::pair<int, double>>>;
using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Absorption split by column for a substochastic transient system: internal
// edges q, direct absorption rows b. Rows that cannot reach absorption come
// back zero.
Eigen::MatrixXd transient_absorption(const Edges& q, const Eigen::MatrixXd& b,
                                     bool* warning = nullptr) {
    const int nr = static_cast<int>(q.size());
    Edges rev(q.size());
    for (int i = 0; i < nr; ++i)
        for (const auto& [j, p] : q[static_cast<size_t>(i)])
            if (p > 0.0) rev[static_cast<size_t>(j)].push_back({i, p});
    std::vector<char> can(q.size(), 0);
    std::deque<int> queue;
    for (int i = 0; i < nr; ++i)
        if (b.row(i).sum() > 0.0) {
            can[static_cast<size_t>(i)] = 1;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        const int j = queue.front();
        queue.pop_front();
        for (const auto& [i, p] : rev[static_cast<size_t>(j)])
            if (!can[static_cast<size_t>(i)]) {
                can[static_cast<size_t>(i)] = 1;
                queue.push_back(i);
            }
    }
    std::vector<int> idx(q.size(), -1);
    int nk = 0;
    for (int i = 0; i < nr; ++i)
        if (can[static_cast<size_t>(i)]) idx[static_cast<size_t>(i)] = nk++;
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(nr, b.cols());
    if (nk == 0) return full;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nk, nk);
    Eigen::MatrixXd rhs(nk, b.cols());
    for (int i = 0; i < nr; ++i) {
        if (!can[static_cast<size_t>(i)]) continue;
        const int r = idx[static_cast<size_t>(i)];
        rhs.row(r) = b.row(i);
        for (const auto& [j, p] : q[static_cast<size_t>(i)])
            if (idx[static_cast<size_t>(j)] >= 0) a(r, idx[static_cast<size_t>(j)]) -= p;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::MatrixXd x = lu.solve(rhs);
    if (warning && (a * x - rhs).norm() > kResidualTol * (1.0 + rhs.norm()))
        *warning = true;
    for (int i = 0; i < nr; ++i)
        if (can[static_cast<size_t>(i)]) full.row(i) = x.row(idx[static_cast<size_t>(i)]);
    return full;
}

// Expected steps to absorption restricted to the rows of `can` (absorption
// reachers); the absorbing step itself is counted.
Eigen::VectorXd transient_times(const Edges& q, const Eigen::MatrixXd& b) {
    const int nr = static_cast<int>(q.size());
    Eigen::MatrixXd x = transient_absorption(q, b);
    std::vector<int> idx(q.size(), -1);
    int nk = 0;
    for (int i = 0; i < nr; ++i)
        if (x.row(i).sum() > 0.0) idx[static_cast<size_t>(i)] = nk++;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(nr);
    if (nk == 0) return full;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nk, nk);
    for (int i = 0; i < nr; ++i) {
        if (idx[static_cast<size_t>(i)] < 0) continue;
        for (const auto& [j, p] : q[static_cast<size_t>(i)])
            if (idx[static_cast<size_t>(j)] >= 0)
                a(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]) -= p;
    }
    Eigen::VectorXd t = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(
        Eigen::VectorXd::Ones(nk));
    for (int i = 0; i < nr; ++i)
        if (idx[static_cast<size_t>(i)] >= 0) full(i) = t(idx[static_cast<size_t>(i)]);
    return full;
}

void require_valid_chain(const AbsorbingChain& c, const char* label) {
    auto bad = validate_chain(c);
    if (!bad.empty()) throw std::invalid_argument(std::string(label) + ": " + bad.front());
}

// Transient system of a validated chain: states 0..m-3, columns {reject, accept}.
void chain_system(const AbsorbingChain& c, Edges& q, Eigen::MatrixXd& b) {
    const int nt = c.m - 2;
    q.assign(static_cast<size_t>(nt), {});
    b = Eigen::MatrixXd::Zero(nt, 2);
    for (int i = 0; i < nt; ++i) {
        b(i, 0) = c.at(i, c.reject_state());
        b(i, 1) = c.at(i, c.accept_state());
        for (int j = 0; j < nt; ++j)
            if (c.at(i, j) > 0.0) q[static_cast<size_t>(i)].push_back({j, c.at(i, j)});
    }
}

void require_valid_machine(const NonuniformMachine& m) {
    auto bad = validate_machine(m);
    if (!bad.empty()) throw std::invalid_argument(bad.front().format());
}

// First-passage absorption out of tape region [lo, hi] (0-based, inclusive).
// Rows: (state, pos) with pos-major stride num_states; halting-state rows are
// zero. Columns: exit left in state s (s), exit right in state s
// (num_states + s), halt accepting (2*num_states), halt rejecting (+1).
Eigen::MatrixXd region_absorption(const NonuniformMachine& m, const Word& tape,
                                  int lo, int hi) {
    const int S = m.num_states;
    const int span = hi - lo + 1;
    Edges q(static_cast<size_t>(span) * S);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(span * S, 2 * S + 2);
    for (int pos = lo; pos <= hi; ++pos) {
        for (int s = 0; s < S; ++s) {
            if (m.is_halting(s)) continue;
            const int row = (pos - lo) * S + s;
            for (const auto& t : m.at(pos, s, tape[static_cast<size_t>(pos)])) {
                const double p = m.kind == MachineKind::prob ? t.prob : 1.0;
                if (m.is_halting(t.state)) {
                    b(row, 2 * S + (t.state == m.accept ? 0 : 1)) += p;
                    continue;
                }
                const int npos = pos + static_cast<int>(t.move);
                if (npos < lo)
                    b(row, t.state) += p;
                else if (npos > hi)
                    b(row, S + t.state) += p;
                else
                    q[static_cast<size_t>(row)].push_back({(npos - lo) * S + t.state, p});
            }
        }
    }
    return transient_absorption(q, b);
}

}  // namespace

AbsorbingChain AbsorbingChain::zero(int m) {
    AbsorbingChain c;
    c.m = m;
    c.p.assign(static_cast<size_t>(m) * m, 0.0);
    return c;
}

std::vector<std::string> validate_chain(const AbsorbingChain& c) {
    std::vector<std::string> out;
    auto note = [&out](const std::string& s) { out.push_back(s); };
    if (c.m < 3) {
        note("chain needs at least 3 states (start plus two absorbing)");
        return out;
    }
    if (c.p.size() != static_cast<size_t>(c.m) * c.m) {
        note("matrix storage does not match the declared state count");
        return out;
    }
    for (int i = 0; i < c.m; ++i) {
        double sum = 0.0;
        for (int j = 0; j < c.m; ++j) {
            const double v = c.at(i, j);
            if (v < 0.0) {
                std::ostringstream s;
                s << "negative entry at row " << i + 1 << ", column " << j + 1;
                note(s.str());
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            std::ostringstream s;
            s << "row " << i + 1 << " sums to " << sum << ", not 1";
            note(s.str());
        }
    }
    for (int i : {c.reject_state(), c.accept_state()}) {
        if (std::abs(c.at(i, i) - 1.0) > kRowSumTol) {
            std::ostringstream s;
            s << "absorbing row " << i + 1 << " is not a point mass on itself";
            note(s.str());
        }
    }
    return out;
}

double absorption_probability(const AbsorbingChain& c) {
    require_valid_chain(c, "chain");
    Edges q;
    Eigen::MatrixXd b;
    chain_system(c, q, b);
    return transient_absorption(q, b)(0, 1);
}

AbsorptionTime expected_absorption_time(const AbsorbingChain& c) {
    require_valid_chain(c, "chain");
    Edges q;
    Eigen::MatrixXd b;
    chain_system(c, q, b);
    Eigen::MatrixXd x = transient_absorption(q, b);
    if (x.row(0).sum() < 1.0 - kHaltTol) return {true, 0.0};
    return {false, transient_times(q, b)(0)};
}

bool beta_close(double p, double pp, double beta) {
    if (beta < 1.0) throw std::invalid_argument("beta must be at least 1");
    if (p < 0.0 || pp < 0.0) throw std::invalid_argument("probabilities must be nonnegative");
    if (p == 0.0 && pp == 0.0) return true;
    return p > 0.0 && pp > 0.0 && p <= beta * pp && pp <= beta * p;
}

bool beta_close_mod_lambda(double p, double pp, double beta, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    if (p <= lambda && pp <= lambda) return true;
    return p >= lambda && pp >= lambda && beta_close(p, pp, beta);
}

bool chains_beta_close_mod_lambda(const AbsorbingChain& a, const AbsorbingChain& b,
                                  double beta, double lambda) {
    if (a.m != b.m) throw std::invalid_argument("chains must have the same state count");
    for (size_t k = 0; k < a.p.size(); ++k)
        if (!beta_close_mod_lambda(a.p[k], b.p[k], beta, lambda)) return false;
    return true;
}

CrossingMatrix crossing_matrix(const NonuniformMachine& m, const Word& w, int u,
                               BoundaryVectors* vectors) {
    require_valid_machine(m);
    if (m.kind == MachineKind::nondet)
        throw std::invalid_argument(
            "crossing analysis supports deterministic and probabilistic machines");
    if (static_cast<int>(w.size()) != m.n)
        throw std::invalid_argument("input length does not match the machine");
    if (u < 1 || u > m.n - 1)
        throw std::invalid_argument("split u must lie in [1, n-1]");
    if (m.is_halting(m.initial))
        throw std::invalid_argument("crossing analysis needs a non-halting initial state");
    const Word tape = m.shuffle ? apply_shuffle(*m.shuffle, w) : w;

    const int S = m.num_states;
    CrossingMatrix cm;
    cm.d = S;
    cm.dim = 2 * S + 3;
    cm.split = u;
    cm.entries.assign(static_cast<size_t>(cm.dim) * cm.dim, 0.0);

    // Left part: squares 1..u (positions 0..u-1); exits only rightward.
    Eigen::MatrixXd left = region_absorption(m, tape, 0, u - 1);
    for (int j = 0; j < S; ++j) cm.at(0, S + 3 + j) = left(m.initial, S + j);
    for (int s = 0; s < S; ++s) {
        if (m.is_halting(s)) continue;  // boundary rows for halting states stay zero
        const int row = (u - 1) * S + s;
        for (int j = 0; j < S; ++j) cm.at(1 + s, S + 3 + j) = left(row, S + j);
    }
    // Halting rows are point masses.
    cm.at(S + 1, S + 1) = 1.0;
    cm.at(S + 2, S + 2) = 1.0;
    // Right part: squares u+1..n (positions u..n-1); exits leftward or halting.
    Eigen::MatrixXd right = region_absorption(m, tape, u, m.n - 1);
    for (int s = 0; s < S; ++s) {
        if (m.is_halting(s)) continue;
        for (int j = 0; j < S; ++j) cm.at(S + 3 + s, 1 + j) = right(s, j);
        cm.at(S + 3 + s, S + 1) = right(s, 2 * S);
        cm.at(S + 3 + s, S + 2) = right(s, 2 * S + 1);
    }
    if (vectors) {
        vectors->start.assign(static_cast<size_t>(cm.dim), 0.0);
        vectors->accept.assign(static_cast<size_t>(cm.dim), 0.0);
        vectors->start[0] = 1.0;
        vectors->accept[static_cast<size_t>(S) + 1] = 1.0;
    }
    return cm;
}

CrossingReport verify_crossing_identity(const NonuniformMachine& m, const Word& w,
                                        int u, double tol) {
    CrossingReport rep;
    rep.split = u;
    rep.tol = tol;
    rep.simulator_accept = acceptance_probability(m, w).accept;

    const CrossingMatrix cm = crossing_matrix(m, w, u);
    const int S = cm.d;
    const int acc = S + 1;
    const int rej = S + 2;
    // Absorption of the crossing chain itself into the accept-at-n state.
    Edges q(static_cast<size_t>(cm.dim));
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cm.dim, 2);
    for (int i = 0; i < cm.dim; ++i) {
        if (i == acc || i == rej) continue;
        b(i, 0) = cm.at(i, rej);
        b(i, 1) = cm.at(i, acc);
        for (int j = 0; j < cm.dim; ++j)
            if (j != acc && j != rej && cm.at(i, j) > 0.0)
                q[static_cast<size_t>(i)].push_back({j, cm.at(i, j)});
    }
    rep.crossing_accept = transient_absorption(q, b)(0, 1);

    // Monotone first-passage accumulation start * M^t * accept. The accept
    // coordinate only ever grows toward the solve, so iterate generously and
    // stop once it is comfortably inside the tolerance.
    Eigen::Map<const RowMajor> mat(cm.entries.data(), cm.dim, cm.dim);
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(cm.dim);
    v(0) = 1.0;
    const long t_max = std::max(10L * S * m.n, 20000L);
    long t = 0;
    while (t < t_max) {
        v = v * mat;
        ++t;
        if (std::abs(v(acc) - rep.crossing_accept) <= tol / 4) break;
    }
    rep.power_accumulated = v(acc);
    rep.t_used = t;
    rep.agreed = std::abs(rep.crossing_accept - rep.simulator_accept) <= tol;
    rep.converged = std::abs(rep.power_accumulated - rep.crossing_accept) <= tol;
    return rep;
}

BetaCloseReport check_betaclose_lemma(const AbsorbingChain& P, const AbsorbingChain& Pp,
                                      double eps) {
    require_valid_chain(P, "P");
    require_valid_chain(Pp, "P'");
    if (P.m != Pp.m) throw std::invalid_argument("chains must have the same state count");
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("eps must lie in (0, 1/2]");
    const int mm = P.m;
    BetaCloseReport rep;
    rep.a_p = absorption_probability(P);
    rep.a_pprime = absorption_probability(Pp);
    const AbsorptionTime tp = expected_absorption_time(P);
    const AbsorptionTime tpp = expected_absorption_time(Pp);
    if (tp.infinite || tpp.infinite)
        throw std::invalid_argument(
            "expected absorption time is infinite; the robustness check needs halting chains");
    rep.t_used = std::max({tp.value, tpp.value, static_cast<double>(mm)});
    rep.lambda = eps * eps / (256.0 * rep.t_used * rep.t_used * rep.t_used);
    rep.beta = std::pow((1.0 + eps + eps * eps) / (1.0 + eps), 1.0 / (2.0 * mm));
    rep.precondition_ok = rep.a_p >= 0.5 + eps - 1e-12;
    rep.gate_holds = chains_beta_close_mod_lambda(P, Pp, rep.beta, rep.lambda);
    const double m3 = static_cast<double>(mm) * mm * mm;
    rep.intermediate = (1.0 - 2.0 * rep.lambda * m3) * std::pow(rep.beta, -2.0 * mm) * rep.a_p -
                       4.0 * std::sqrt(rep.lambda * mm * rep.t_used);
    rep.margin = rep.a_pprime - (0.5 + eps / 4.0);
    rep.conclusion_holds = rep.gate_holds && rep.precondition_ok && rep.margin >= 0.0;
    return rep;
}

}  // namespace twa
