#include "machine.hpp"

#include <cmath>
#include <stdexcept>

namespace twa {

bool ShufflePermutation::is_permutation() const {
    const int n = static_cast<int>(to_square.size());
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int v : to_square) {
        if (v < 0 || v >= n || seen[static_cast<size_t>(v)]) return false;
        seen[static_cast<size_t>(v)] = 1;
    }
    return true;
}

Word apply_shuffle(const ShufflePermutation& theta, const Word& w) {
    if (theta.to_square.size() != w.size())
        throw std::invalid_argument("shuffle arity");
    Word out(w.size());
    for (size_t j = 0; j < w.size(); ++j)
        out[static_cast<size_t>(theta.to_square[j])] = w[j];
    return out;
}

NonuniformMachine NonuniformMachine::make(MachineKind kind, int n, int num_states,
                                          int initial, int accept, int reject) {
    NonuniformMachine m;
    m.kind = kind;
    m.n = n;
    m.num_states = num_states;
    m.initial = initial;
    m.accept = accept;
    m.reject = reject;
    m.delta.assign(static_cast<size_t>(n) * num_states * 2, {});
    return m;
}

UniformTwoWayMachine UniformTwoWayMachine::make(MachineKind kind, int num_states,
                                                int initial, int accept, int reject) {
    UniformTwoWayMachine m;
    m.kind = kind;
    m.num_states = num_states;
    m.initial = initial;
    m.accept = accept;
    m.reject = reject;
    m.delta.assign(static_cast<size_t>(num_states) * kUniformSyms, {});
    return m;
}

std::string Violation::format() const {
    std::string s = message;
    bool first = true;
    auto add = [&](const char* name, int v) {
        if (v < 0) return;
        s += first ? " (" : ", ";
        first = false;
        s += name;
        s += "=";
        s += std::to_string(v);
    };
    add("position", pos);
    add("state", state);
    add("symbol", symbol);
    if (!first) s += ")";
    return s;
}

namespace {

constexpr double kProbSumTol = 1e-12;

void check_targets(std::vector<Violation>& out, MachineKind kind, const TargetList& ts,
                   int pos1, int state1, int sym) {
    if (kind == MachineKind::det && ts.size() != 1) {
        out.push_back({"deterministic entry must have exactly one target", pos1, state1, sym});
    }
    if (kind == MachineKind::prob) {
        if (ts.empty()) {
            out.push_back({"probabilistic entry has no targets", pos1, state1, sym});
        } else {
            double sum = 0.0;
            bool neg = false;
            for (const auto& t : ts) {
                if (t.prob < 0.0) neg = true;
                sum += t.prob;
            }
            if (neg)
                out.push_back({"negative transition probability", pos1, state1, sym});
            if (std::fabs(sum - 1.0) > kProbSumTol)
                out.push_back({"transition probabilities do not sum to 1", pos1, state1, sym});
        }
    }
}

}  // namespace

std::vector<Violation> validate_machine(const NonuniformMachine& m) {
    std::vector<Violation> out;
    if (m.n < 1) out.push_back({"input length must be at least 1"});
    if (m.num_states < 3) out.push_back({"machine needs at least 3 states"});
    auto in_range = [&](int s) { return s >= 0 && s < m.num_states; };
    if (!in_range(m.initial)) out.push_back({"initial state out of range"});
    if (!in_range(m.accept)) out.push_back({"accept state out of range"});
    if (!in_range(m.reject)) out.push_back({"reject state out of range"});
    if (m.accept == m.reject) out.push_back({"accept and reject states must differ"});
    if (!out.empty()) return out;  // coordinates below rely on the basics

    if (m.delta.size() != static_cast<size_t>(m.n) * m.num_states * 2) {
        out.push_back({"transition table has wrong shape"});
        return out;
    }
    if (m.shuffle && (static_cast<int>(m.shuffle->to_square.size()) != m.n ||
                      !m.shuffle->is_permutation()))
        out.push_back({"shuffle is not a permutation of the squares"});

    for (int pos = 0; pos < m.n; ++pos) {
        for (int s = 0; s < m.num_states; ++s) {
            for (int sym = 0; sym < 2; ++sym) {
                const TargetList& ts = m.at(pos, s, sym);
                const int pos1 = pos + 1, state1 = s + 1;
                if (m.is_halting(s)) {
                    if (!ts.empty())
                        out.push_back({"halting state has outgoing transitions", pos1, state1, sym});
                    continue;
                }
                check_targets(out, m.kind, ts, pos1, state1, sym);
                for (const auto& t : ts) {
                    if (!in_range(t.state)) {
                        out.push_back({"target state out of range", pos1, state1, sym});
                        continue;
                    }
                    if (pos == 0 && t.move == HeadMove::left)
                        out.push_back({"Left move at position 1", pos1, state1, sym});
                    if (pos == m.n - 1 && t.move == HeadMove::right && !m.is_halting(t.state))
                        out.push_back(
                            {"Right move at position n for a non-halting target", pos1, state1, sym});
                    if (m.is_halting(t.state) && pos != m.n - 1)
                        out.push_back(
                            {"halting state entered before rightmost square", pos1, state1, sym});
                }
            }
        }
    }
    return out;
}

std::vector<Violation> validate_uniform(const UniformTwoWayMachine& m) {
    std::vector<Violation> out;
    if (m.kind == MachineKind::prob)
        out.push_back({"uniform machines are deterministic or nondeterministic"});
    if (m.num_states < 3) out.push_back({"machine needs at least 3 states"});
    auto in_range = [&](int s) { return s >= 0 && s < m.num_states; };
    if (!in_range(m.initial)) out.push_back({"initial state out of range"});
    if (!in_range(m.accept)) out.push_back({"accept state out of range"});
    if (!in_range(m.reject)) out.push_back({"reject state out of range"});
    if (m.accept == m.reject) out.push_back({"accept and reject states must differ"});
    if (!out.empty()) return out;

    if (m.delta.size() != static_cast<size_t>(m.num_states) * kUniformSyms) {
        out.push_back({"transition table has wrong shape"});
        return out;
    }
    for (int s = 0; s < m.num_states; ++s) {
        for (int sym = 0; sym < kUniformSyms; ++sym) {
            const TargetList& ts = m.at(s, sym);
            const int state1 = s + 1;
            if (m.is_halting(s)) {
                if (!ts.empty())
                    out.push_back({"halting state has outgoing transitions", -1, state1, sym});
                continue;
            }
            if (m.kind == MachineKind::det && ts.size() != 1)
                out.push_back(
                    {"deterministic entry must have exactly one target", -1, state1, sym});
            for (const auto& t : ts) {
                if (!in_range(t.state)) {
                    out.push_back({"target state out of range", -1, state1, sym});
                    continue;
                }
                if (sym == kSymLeftEnd && t.move == HeadMove::left)
                    out.push_back({"Left move at the left endmarker", -1, state1, sym});
                if (sym == kSymRightEnd && t.move == HeadMove::right && !m.is_halting(t.state))
                    out.push_back({"Right move at the right endmarker for a non-halting target",
                                   -1, state1, sym});
                if (m.is_halting(t.state) && sym != kSymRightEnd)
                    out.push_back(
                        {"halting state entered before the right endmarker", -1, state1, sym});
            }
        }
    }
    return out;
}

NonuniformMachine embed_as(const NonuniformMachine& det_machine, MachineKind kind) {
    if (det_machine.kind != MachineKind::det)
        throw std::invalid_argument("embed_as expects a deterministic machine");
    NonuniformMachine m = det_machine;
    m.kind = kind;
    for (auto& ts : m.delta)
        for (auto& t : ts) t.prob = 1.0;
    return m;
}

}  // namespace twa
