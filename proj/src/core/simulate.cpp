#include "simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace twa {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::accept: return "accept";
        case Verdict::reject: return "reject";
        default: return "diverge";
    }
}

const char* decision_name(Decision d) {
    switch (d) {
        case Decision::accept: return "accept";
        case Decision::reject: return "reject";
        default: return "undecided";
    }
}

namespace {

Word effective_input(const NonuniformMachine& m, const Word& w) {
    if (static_cast<int>(w.size()) != m.n)
        throw std::invalid_argument("input length does not match the machine");
    return m.shuffle ? apply_shuffle(*m.shuffle, w) : w;
}

const TransitionTarget& single_target(const NonuniformMachine& m, int pos, int s, int sym) {
    const TargetList& ts = m.at(pos, s, sym);
    if (ts.size() != 1)
        throw std::invalid_argument("deterministic entry must have exactly one target");
    return ts[0];
}

}  // namespace

RunOutcome run_deterministic(const NonuniformMachine& m, const Word& w,
                             std::vector<TraceEntry>* trace) {
    if (m.kind != MachineKind::det)
        throw std::invalid_argument("run_deterministic expects a Det machine");
    const Word tape = effective_input(m, w);
    const long bound = static_cast<long>(m.num_states) * m.n + 1;
    int s = m.initial, pos = 0;
    if (trace) trace->push_back({s, pos});
    long steps = 0;
    while (!m.is_halting(s)) {
        if (steps >= bound) return {Verdict::diverge, -1};
        const TransitionTarget& t = single_target(m, pos, s, tape[static_cast<size_t>(pos)]);
        s = t.state;
        if (!m.is_halting(s)) {
            pos += static_cast<int>(t.move);
            if (pos < 0 || pos >= m.n)
                throw std::invalid_argument("head left the tape (machine fails validation)");
        }
        ++steps;
        if (trace) trace->push_back({s, pos});
    }
    return {s == m.accept ? Verdict::accept : Verdict::reject, steps};
}

Verdict run_nondeterministic(const NonuniformMachine& m, const Word& w) {
    const Word tape = effective_input(m, w);
    if (m.initial == m.accept) return Verdict::accept;
    if (m.initial == m.reject) return Verdict::reject;
    std::vector<char> seen(static_cast<size_t>(m.n) * m.num_states, 0);
    std::vector<int> stack;
    auto push = [&](int pos, int s) {
        const size_t id = static_cast<size_t>(pos) * m.num_states + s;
        if (!seen[id]) {
            seen[id] = 1;
            stack.push_back(static_cast<int>(id));
        }
    };
    push(0, m.initial);
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const int pos = id / m.num_states, s = id % m.num_states;
        for (const TransitionTarget& t : m.at(pos, s, tape[static_cast<size_t>(pos)])) {
            if (t.state == m.accept) return Verdict::accept;
            if (t.state == m.reject) continue;
            const int np = pos + static_cast<int>(t.move);
            if (np < 0 || np >= m.n) continue;
            push(np, t.state);
        }
    }
    return Verdict::reject;
}

namespace {

// Absorbing-chain view of a run: per-configuration outgoing edges plus direct
// accept/reject mass, restricted to configurations that can reach absorption.
struct ConfigChain {
    int K = 0;                  // solvable configurations
    std::vector<int> idx;       // config id -> compact index or -1
    std::vector<int> configs;   // compact index -> config id
    std::vector<std::vector<std::pair<int, double>>> adj;  // by config id
    std::vector<double> acc_direct, rej_direct;            // by config id
    int start_id = -1;
    bool start_solvable = false;
};

ConfigChain build_config_chain(const NonuniformMachine& m, const Word& tape) {
    const int S = m.num_states;
    const size_t C = static_cast<size_t>(m.n) * S;
    ConfigChain ch;
    ch.adj.assign(C, {});
    ch.acc_direct.assign(C, 0.0);
    ch.rej_direct.assign(C, 0.0);
    std::vector<std::vector<int>> radj(C);
    std::vector<char> touches(C, 0);
    for (int pos = 0; pos < m.n; ++pos) {
        for (int s = 0; s < S; ++s) {
            if (m.is_halting(s)) continue;
            const size_t c = static_cast<size_t>(pos) * S + s;
            for (const TransitionTarget& t : m.at(pos, s, tape[static_cast<size_t>(pos)])) {
                if (t.state == m.accept) {
                    ch.acc_direct[c] += t.prob;
                    touches[c] = 1;
                } else if (t.state == m.reject) {
                    ch.rej_direct[c] += t.prob;
                    touches[c] = 1;
                } else {
                    const int np = pos + static_cast<int>(t.move);
                    if (np < 0 || np >= m.n)
                        throw std::invalid_argument("head leaves the tape (machine fails validation)");
                    const size_t c2 = static_cast<size_t>(np) * S + t.state;
                    ch.adj[c].push_back({static_cast<int>(c2), t.prob});
                    radj[c2].push_back(static_cast<int>(c));
                }
            }
        }
    }
    // Backward reachability from configurations with direct halting mass:
    // everything else has absorption probability exactly 0.
    std::vector<char> can(C, 0);
    std::queue<int> q;
    for (size_t c = 0; c < C; ++c)
        if (touches[c]) {
            can[c] = 1;
            q.push(static_cast<int>(c));
        }
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        for (int p : radj[static_cast<size_t>(c)])
            if (!can[static_cast<size_t>(p)]) {
                can[static_cast<size_t>(p)] = 1;
                q.push(p);
            }
    }
    ch.idx.assign(C, -1);
    for (size_t c = 0; c < C; ++c)
        if (can[c]) {
            ch.idx[c] = ch.K++;
            ch.configs.push_back(static_cast<int>(c));
        }
    ch.start_id = m.initial;  // config (initial, square 1) = 0*S + initial
    ch.start_solvable = can[static_cast<size_t>(ch.start_id)] != 0;
    return ch;
}

}  // namespace

AcceptanceProbability acceptance_probability(const NonuniformMachine& m, const Word& w) {
    if (m.kind == MachineKind::nondet)
        throw std::invalid_argument("acceptance_probability is undefined for Nondet machines");
    const Word tape = effective_input(m, w);
    AcceptanceProbability out;
    if (m.initial == m.accept) {
        out.accept = 1.0;
        return out;
    }
    if (m.initial == m.reject) {
        out.reject = 1.0;
        return out;
    }
    const ConfigChain ch = build_config_chain(m, tape);
    if (!ch.start_solvable) {
        out.nonhalting = 1.0;
        return out;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(ch.K, ch.K);
    Eigen::VectorXd ba(ch.K), br(ch.K);
    for (int i = 0; i < ch.K; ++i) {
        const size_t c = static_cast<size_t>(ch.configs[static_cast<size_t>(i)]);
        ba(i) = ch.acc_direct[c];
        br(i) = ch.rej_direct[c];
        for (const auto& [c2, p] : ch.adj[c])
            if (ch.idx[static_cast<size_t>(c2)] >= 0)
                A(i, ch.idx[static_cast<size_t>(c2)]) -= p;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd xa = lu.solve(ba);
    const Eigen::VectorXd xr = lu.solve(br);
    const double res = std::max((A * xa - ba).lpNorm<Eigen::Infinity>(),
                                (A * xr - br).lpNorm<Eigen::Infinity>());
    out.solver_warning = res > 1e-8;
    const int i0 = ch.idx[static_cast<size_t>(ch.start_id)];
    out.accept = std::clamp(xa(i0), 0.0, 1.0);
    out.reject = std::clamp(xr(i0), 0.0, 1.0);
    out.nonhalting = std::clamp(1.0 - out.accept - out.reject, 0.0, 1.0);
    return out;
}

ExpectedTime expected_running_time(const NonuniformMachine& m, const Word& w) {
    const AcceptanceProbability ap = acceptance_probability(m, w);
    if (ap.nonhalting > 1e-9) return {true, 0.0};
    if (m.initial == m.accept || m.initial == m.reject) return {false, 0.0};
    const Word tape = effective_input(m, w);
    const ConfigChain ch = build_config_chain(m, tape);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(ch.K, ch.K);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(ch.K);
    for (int i = 0; i < ch.K; ++i) {
        const size_t c = static_cast<size_t>(ch.configs[static_cast<size_t>(i)]);
        for (const auto& [c2, p] : ch.adj[c])
            if (ch.idx[static_cast<size_t>(c2)] >= 0)
                A(i, ch.idx[static_cast<size_t>(c2)]) -= p;
    }
    const Eigen::VectorXd t = A.partialPivLu().solve(b);
    return {false, t(ch.idx[static_cast<size_t>(ch.start_id)])};
}

Decision decide_probabilistic(const NonuniformMachine& m, const Word& w, double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("eps must lie in (0, 1/2]");
    const AcceptanceProbability ap = acceptance_probability(m, w);
    if (ap.accept >= 0.5 + eps) return Decision::accept;
    if (ap.reject >= 0.5 + eps) return Decision::reject;
    return Decision::undecided;
}

RunOutcome run_uniform_2dfa(const UniformTwoWayMachine& m, const Word& w,
                            std::vector<TraceEntry>* trace) {
    if (m.kind != MachineKind::det)
        throw std::invalid_argument("run_uniform_2dfa expects a Det machine");
    const int n = static_cast<int>(w.size());
    auto sym_at = [&](int pos) {
        if (pos == 0) return kSymLeftEnd;
        if (pos == n + 1) return kSymRightEnd;
        return static_cast<int>(w[static_cast<size_t>(pos - 1)]);
    };
    const long bound = static_cast<long>(m.num_states) * (n + 2) + 1;
    int s = m.initial, pos = 0;
    if (trace) trace->push_back({s, pos});
    long steps = 0;
    while (!m.is_halting(s)) {
        if (steps >= bound) return {Verdict::diverge, -1};
        const TargetList& ts = m.at(s, sym_at(pos));
        if (ts.size() != 1)
            throw std::invalid_argument("deterministic entry must have exactly one target");
        const TransitionTarget& t = ts[0];
        s = t.state;
        if (!m.is_halting(s)) {
            pos += static_cast<int>(t.move);
            if (pos < 0 || pos > n + 1)
                throw std::invalid_argument("head left the tape (machine fails validation)");
        }
        ++steps;
        if (trace) trace->push_back({s, pos});
    }
    return {s == m.accept ? Verdict::accept : Verdict::reject, steps};
}

RunOutcome sample_run(const NonuniformMachine& m, const Word& w, Xoshiro256& rng,
                      long step_cap) {
    const Word tape = effective_input(m, w);
    int s = m.initial, pos = 0;
    long steps = 0;
    while (!m.is_halting(s)) {
        if (steps >= step_cap) return {Verdict::diverge, -1};
        const TargetList& ts = m.at(pos, s, tape[static_cast<size_t>(pos)]);
        const double r = rng.uniform01();
        double acc = 0.0;
        const TransitionTarget* pick = &ts.back();
        for (const TransitionTarget& t : ts) {
            acc += t.prob;
            if (r < acc) {
                pick = &t;
                break;
            }
        }
        s = pick->state;
        if (!m.is_halting(s)) pos += static_cast<int>(pick->move);
        ++steps;
    }
    return {s == m.accept ? Verdict::accept : Verdict::reject, steps};
}

CompiledDet compile_deterministic(const NonuniformMachine& m) {
    if (m.kind != MachineKind::det)
        throw std::invalid_argument("compile_deterministic expects a Det machine");
    if (m.n > 64) throw std::invalid_argument("compiled runner supports n <= 64");
    CompiledDet c;
    c.n = m.n;
    c.num_states = m.num_states;
    c.initial = m.initial;
    c.accept = m.accept;
    c.reject = m.reject;
    c.step_bound = static_cast<long>(m.num_states) * m.n + 1;
    const size_t cells = static_cast<size_t>(m.n) * m.num_states * 2;
    c.next.assign(cells, 0);
    c.dpos.assign(cells, 0);
    for (int pos = 0; pos < m.n; ++pos)
        for (int s = 0; s < m.num_states; ++s)
            for (int sym = 0; sym < 2; ++sym) {
                const size_t i = m.slot(pos, s, sym);
                if (m.is_halting(s)) {
                    c.next[i] = s;
                    c.dpos[i] = 0;
                    continue;
                }
                const TargetList& ts = m.at(pos, s, sym);
                if (ts.size() != 1)
                    throw std::invalid_argument("deterministic entry must have exactly one target");
                c.next[i] = ts[0].state;
                c.dpos[i] = m.is_halting(ts[0].state)
                                ? static_cast<int8_t>(0)
                                : static_cast<int8_t>(static_cast<int>(ts[0].move));
            }
    c.from_square.assign(static_cast<size_t>(m.n), 0);
    if (m.shuffle) {
        for (int j = 0; j < m.n; ++j)
            c.from_square[static_cast<size_t>(m.shuffle->to_square[static_cast<size_t>(j)])] = j;
    } else {
        for (int j = 0; j < m.n; ++j) c.from_square[static_cast<size_t>(j)] = j;
    }
    return c;
}

Verdict CompiledDet::run(uint64_t mask, long* steps) const {
    int s = initial, pos = 0;
    if (s == accept || s == reject) {
        if (steps) *steps = 0;
        return s == accept ? Verdict::accept : Verdict::reject;
    }
    for (long k = 0; k < step_bound; ++k) {
        const unsigned sym =
            static_cast<unsigned>(mask >> from_square[static_cast<size_t>(pos)]) & 1u;
        const size_t i = (static_cast<size_t>(pos) * num_states + s) * 2 + sym;
        s = next[i];
        pos += dpos[i];
        if (s == accept || s == reject) {
            if (steps) *steps = k + 1;
            return s == accept ? Verdict::accept : Verdict::reject;
        }
    }
    return Verdict::diverge;
}

}  // namespace twa
