#include "construct.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <map>
#include <stdexcept>

#include "bits.hpp"
#include "witness.hpp"

namespace twa {

namespace {

int bit_of(int x, int j) { return (x >> j) & 1; }

void set1(NonuniformMachine& m, int pos, int s, int sym, int to, HeadMove mv) {
    m.at(pos, s, sym) = {TransitionTarget{to, mv, 1.0}};
}

void set_both(NonuniformMachine& m, int pos, int s, int to, HeadMove mv) {
    set1(m, pos, s, 0, to, mv);
    set1(m, pos, s, 1, to, mv);
}

void require_valid(const std::vector<Violation>& violations, const char* builder) {
    if (violations.empty()) return;
    throw std::logic_error(std::string(builder) + " construction is invalid: " +
                           violations.front().format());
}

// One scan phase of the address-chain machines. `pool` states double up by
// head position: at address offsets pool[slot] is the comparator branch for
// one target address, at value offsets pool[v] carries the running sum v.
struct ChainPhase {
    std::vector<int> targets;
    bool plus_t = false;  // result of this phase is v + t rather than v
    bool last = false;
    std::vector<int> pool;
    std::map<int, int> lo_slot;  // target -> pool slot of its main branch
    std::map<int, int> hi_slot;  // wraparound targets: slot of the +2t branch
    std::map<int, int> skip;     // target -> skip-to-next-block state
    std::map<int, int> ret;      // result -> carry-back state (phases 1..3)
    int accw = -1, rejw = -1;    // final phase halting walks
    int first_id = 0, state_count = 0;
};

std::array<ChainPhase, 4> chain_phases(int t) {
    std::array<ChainPhase, 4> ph;
    ph[0].targets = {2};
    for (int a = t; a < 2 * t; ++a) ph[1].targets.push_back(a);
    for (int a = 0; a < t; ++a) ph[2].targets.push_back(a);
    ph[3].targets = ph[1].targets;
    ph[0].plus_t = ph[2].plus_t = true;
    ph[3].last = true;
    return ph;
}

}  // namespace

std::string report_to_json(const ConstructionReport& report, bool pretty) {
    nlohmann::ordered_json j;
    j["builder"] = report.builder;
    if (report.t > 0) j["t"] = report.t;
    if (report.n > 0) j["n"] = report.n;
    j["actual_states"] = report.actual_states;
    j["declared_state_bound"] = report.declared_state_bound;
    auto& phases = j["phase_state_accounting"] = nlohmann::ordered_json::array();
    for (const auto& pc : report.phase_state_accounting)
        phases.push_back({{"name", pc.name}, {"states", pc.states}});
    j["notes"] = report.notes;
    return pretty ? j.dump(2) : j.dump();
}

Construction build_saf_2da(int t, int n) {
    const SafParams pr = saf_params(n, t);
    const int tt = 2 * t, c = pr.c, q = pr.q;
    const int u = (1 << c) - tt;  // targets below u match two raw addresses
    const int k = std::countr_zero(static_cast<unsigned>(tt));

    auto ph = chain_phases(t);
    int next_id = 0;
    for (auto& P : ph) {
        P.first_id = next_id;
        const int branches = static_cast<int>(P.targets.size());
        std::vector<int> wrap_targets;
        for (int a : P.targets)
            if (a < u) wrap_targets.push_back(a);
        const int pool_size =
            std::max(t, branches + static_cast<int>(wrap_targets.size()));
        for (int j = 0; j < pool_size; ++j) P.pool.push_back(next_id++);
        for (int i = 0; i < branches; ++i) P.lo_slot[P.targets[i]] = i;
        for (size_t i = 0; i < wrap_targets.size(); ++i)
            P.hi_slot[wrap_targets[i]] = branches + static_cast<int>(i);
        for (int a : P.targets) P.skip[a] = next_id++;
        if (!P.last) {
            const int base = P.plus_t ? t : 0;
            for (int x = base; x < base + t; ++x) P.ret[x] = next_id++;
        } else {
            P.accw = next_id++;
            P.rejw = next_id++;
        }
        P.state_count = next_id - P.first_id;
    }
    const int accept = next_id++;
    const int reject = next_id++;
    const int num_states = next_id;

    auto m = NonuniformMachine::make(MachineKind::det, n, num_states,
                                     ph[0].pool[ph[0].lo_slot.at(2)], accept, reject);
    for (int pos = 0; pos < n; ++pos)
        for (int s = 0; s < num_states; ++s)
            if (!m.is_halting(s)) set_both(m, pos, s, s, HeadMove::stay);

    const int blocks_end = tt * q;  // <= n; squares past it are trailing filler
    for (int pos = 0; pos < n; ++pos) {
        const bool in_blocks = pos < blocks_end;
        const int p = in_blocks ? pos / q : -1;
        const int o = in_blocks ? pos % q : -1;
        for (int i = 0; i < 4; ++i) {
            auto& P = ph[i];
            if (in_blocks && o < c) {
                // Comparator branches live on address offsets, least
                // significant address bit first.
                for (auto [a, slot] : P.lo_slot) {
                    const int self = P.pool[slot];
                    const bool wrap = P.hi_slot.count(a) != 0;
                    for (int sym = 0; sym <= 1; ++sym) {
                        int to;
                        if (wrap && o == k) {
                            // The two raw patterns a and a+2t first differ at
                            // bit k; commit to one of the two suffixes.
                            to = sym == bit_of(a, k) ? self
                                                     : P.pool[P.hi_slot.at(a)];
                        } else if (sym == bit_of(a, o)) {
                            to = o == c - 1 ? P.pool[0] : self;
                        } else {
                            to = P.skip.at(a);
                        }
                        set1(m, pos, self, sym, to, HeadMove::right);
                    }
                }
                for (auto [a, slot] : P.hi_slot) {
                    if (o <= k) continue;  // +2t branch starts after bit k
                    const int self = P.pool[slot];
                    const int hi = a + tt;
                    for (int sym = 0; sym <= 1; ++sym) {
                        const int to = sym == bit_of(hi, o)
                                           ? (o == c - 1 ? P.pool[0] : self)
                                           : P.skip.at(a);
                        set1(m, pos, self, sym, to, HeadMove::right);
                    }
                }
            }
            if (in_blocks && o >= c) {
                // Running parity-sum states on value offsets.
                for (int v = 0; v < t; ++v) {
                    const int self = P.pool[v];
                    for (int sym = 0; sym <= 1; ++sym) {
                        const int vp = (v + sym) % t;
                        if (o < q - 1) {
                            set1(m, pos, self, sym, P.pool[vp], HeadMove::right);
                        } else if (!P.last) {
                            const int res = P.plus_t ? vp + t : vp;
                            set1(m, pos, self, sym, P.ret.at(res), HeadMove::left);
                        } else if (pos == n - 1) {
                            set1(m, pos, self, sym, vp >= 1 ? accept : reject,
                                 HeadMove::stay);
                        } else {
                            set1(m, pos, self, sym, vp >= 1 ? P.accw : P.rejw,
                                 HeadMove::right);
                        }
                    }
                }
            }
            for (auto [a, sid] : P.skip) {
                if (pos == n - 1)
                    set_both(m, pos, sid, reject, HeadMove::stay);
                else if (in_blocks && o == q - 1 && p < tt - 1)
                    set_both(m, pos, sid, P.pool[P.lo_slot.at(a)], HeadMove::right);
                else
                    set_both(m, pos, sid, sid, HeadMove::right);
            }
            if (!P.last) {
                for (auto [x, rid] : P.ret) {
                    if (pos == 0) {
                        auto& next = ph[static_cast<size_t>(i) + 1];
                        set_both(m, pos, rid, next.pool[next.lo_slot.at(x)],
                                 HeadMove::stay);
                    } else {
                        set_both(m, pos, rid, rid, HeadMove::left);
                    }
                }
            } else if (pos == n - 1) {
                set_both(m, pos, P.accw, accept, HeadMove::stay);
                set_both(m, pos, P.rejw, reject, HeadMove::stay);
            } else {
                set_both(m, pos, P.accw, P.accw, HeadMove::right);
                set_both(m, pos, P.rejw, P.rejw, HeadMove::right);
            }
        }
    }
    require_valid(validate_machine(m), "saf");

    ConstructionReport report;
    report.builder = "saf";
    report.t = t;
    report.n = n;
    report.actual_states = num_states;
    report.declared_state_bound = 13 * t + 4;
    for (int i = 0; i < 4; ++i)
        report.phase_state_accounting.push_back(
            {"phase" + std::to_string(i + 1), ph[static_cast<size_t>(i)].state_count});
    report.phase_state_accounting.push_back({"halting", 2});
    report.notes.push_back(
        "comparator branches and running-sum states share physical states, "
        "split by head position; phase totals therefore differ from a "
        "per-role accounting while staying within the declared bound");
    if (u > 0)
        report.notes.push_back(
            "addresses below " + std::to_string(u) +
            " match two raw bit patterns; their branches fork at bit " +
            std::to_string(k) + " into a dedicated high-pattern comparator");
    return {std::move(m), std::move(report)};
}

Construction build_eq_shuffled(int n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("comparison builder needs even n >= 2");
    const int half = n / 2;
    const int c0 = 0, c1 = 1, accw = 2, accept = 3, reject = 4;
    auto m = NonuniformMachine::make(MachineKind::det, n, 5, c0, accept, reject);

    // Interleave so that square 2i+1 holds x_{i+1} and square 2i+2 holds
    // x_{i+1+n/2} (1-based): each pair to compare sits on adjacent squares.
    ShufflePermutation sh;
    sh.to_square.resize(static_cast<size_t>(n));
    for (int j = 0; j < half; ++j) sh.to_square[static_cast<size_t>(j)] = 2 * j;
    for (int j = half; j < n; ++j)
        sh.to_square[static_cast<size_t>(j)] = 2 * (j - half) + 1;
    m.shuffle = sh;

    for (int pos = 0; pos < n; ++pos) {
        if (pos % 2 == 0) {
            for (int s : {c0, c1}) {
                set1(m, pos, s, 0, c0, HeadMove::right);
                set1(m, pos, s, 1, c1, HeadMove::right);
            }
            set_both(m, pos, accw, accw, HeadMove::right);
        } else {
            for (int v = 0; v <= 1; ++v) {
                const int self = v ? c1 : c0;
                for (int sym = 0; sym <= 1; ++sym) {
                    if (sym == v)
                        set1(m, pos, self, sym, pos == n - 1 ? accept : accw,
                             pos == n - 1 ? HeadMove::stay : HeadMove::right);
                    else
                        set1(m, pos, self, sym, pos == n - 1 ? reject : c0,
                             pos == n - 1 ? HeadMove::stay : HeadMove::right);
                }
            }
            if (pos == n - 1)
                set_both(m, pos, accw, accept, HeadMove::stay);
            else
                set_both(m, pos, accw, accw, HeadMove::right);
        }
    }
    require_valid(validate_machine(m), "eq");

    ConstructionReport report;
    report.builder = "eq";
    report.n = n;
    report.actual_states = 5;
    report.declared_state_bound = 6;
    report.phase_state_accounting = {{"scan", 3}, {"halting", 2}};
    report.notes.push_back(
        "two carry states remember the bit read on even squares, one walker "
        "carries an early match to the last square");
    return {std::move(m), std::move(report)};
}

namespace {

// Per-target comparator states of one uniform scan phase. Marks and payloads
// alternate on the tape, so every payload comparison is followed by a mark
// check that aborts into skip mode when the address region ends early.
struct UniformTarget {
    int sk = -1, skp = -1;
    int cmp0 = -1;               // first payload comparator (both layouts)
    std::map<int, int> cmp, chk; // single-pattern chain, j in [1, c)
    std::map<int, int> cmpl, chkl, cmph, chkh;  // wraparound: split tracks
    std::map<int, int> cmps, chks;              // wraparound: shared suffix
};

struct UniformPhase {
    std::vector<int> targets;
    bool plus_t = false;
    bool last = false;
    std::map<int, UniformTarget> per_target;
    std::vector<int> vsum, vadd;
    std::map<int, int> ret;
    int accw = -1, rejw = -1;
    int first_id = 0, state_count = 0;
};

}  // namespace

UniformConstruction build_usaf_2dfa(int t) {
    if (t < 2) throw std::invalid_argument("t must be at least 2");
    const int tt = 2 * t;
    const int c = ceil_log2(static_cast<unsigned>(tt));
    const int u = (1 << c) - tt;
    const int k = std::countr_zero(static_cast<unsigned>(tt));

    std::array<UniformPhase, 4> ph;
    {
        auto base = chain_phases(t);
        for (int i = 0; i < 4; ++i) {
            ph[static_cast<size_t>(i)].targets = base[static_cast<size_t>(i)].targets;
            ph[static_cast<size_t>(i)].plus_t = base[static_cast<size_t>(i)].plus_t;
            ph[static_cast<size_t>(i)].last = base[static_cast<size_t>(i)].last;
        }
    }

    int next_id = 0;
    for (auto& P : ph) {
        P.first_id = next_id;
        for (int a : P.targets) {
            UniformTarget& T = P.per_target[a];
            T.sk = next_id++;
            T.skp = next_id++;
            T.cmp0 = next_id++;
            if (a < u) {
                for (int j = 1; j <= c - 1 - k; ++j) {
                    T.chkl[j] = next_id++;
                    T.cmpl[j] = next_id++;
                    T.chkh[j] = next_id++;
                    T.cmph[j] = next_id++;
                }
                for (int j = c - k; j <= c - 1; ++j) {
                    T.chks[j] = next_id++;
                    T.cmps[j] = next_id++;
                }
            } else {
                for (int j = 1; j <= c - 1; ++j) {
                    T.chk[j] = next_id++;
                    T.cmp[j] = next_id++;
                }
            }
        }
        for (int v = 0; v < t; ++v) P.vsum.push_back(next_id++);
        for (int v = 0; v < t; ++v) P.vadd.push_back(next_id++);
        if (!P.last) {
            const int base = P.plus_t ? t : 0;
            for (int x = base; x < base + t; ++x) P.ret[x] = next_id++;
        } else {
            P.accw = next_id++;
            P.rejw = next_id++;
        }
        P.state_count = next_id - P.first_id;
    }
    const int accept = next_id++;
    const int reject = next_id++;
    const int num_states = next_id;

    auto m = UniformTwoWayMachine::make(MachineKind::det, num_states,
                                        ph[0].per_target.at(2).sk, accept, reject);
    auto set = [&m](int s, int sym, int to, HeadMove mv) {
        m.at(s, sym) = {TransitionTarget{to, mv, 1.0}};
    };
    // Defaults keep every state total: drift right and reject at the end.
    for (int s = 0; s < num_states; ++s) {
        if (m.is_halting(s)) continue;
        for (int sym = 0; sym < kUniformSyms; ++sym)
            if (sym == kSymRightEnd) set(s, sym, reject, HeadMove::stay);
            else set(s, sym, s, HeadMove::right);
    }

    for (int i = 0; i < 4; ++i) {
        auto& P = ph[static_cast<size_t>(i)];
        for (auto& [a, T] : P.per_target) {
            const bool wrap = a < u;
            const int hi = a + tt;
            // next_on_match(j, hi_track): state after payload j matched.
            auto next_on_match = [&](int j, bool hi_track) {
                if (j + 1 == c) return P.vsum[0];
                if (wrap) {
                    if (j + 1 >= c - k) return T.chks.at(j + 1);
                    return hi_track ? T.chkh.at(j + 1) : T.chkl.at(j + 1);
                }
                return T.chk.at(j + 1);
            };
            set(T.sk, kSymLeftEnd, T.sk, HeadMove::right);
            set(T.sk, 0, T.cmp0, HeadMove::right);
            set(T.sk, 1, T.skp, HeadMove::right);
            set(T.sk, kSymRightEnd, reject, HeadMove::stay);
            set(T.skp, 0, T.sk, HeadMove::right);
            set(T.skp, 1, T.sk, HeadMove::right);

            if (wrap) {
                // Payload 0 is the most significant address bit, where the
                // raw patterns a (bit 0) and a+2t (bit 1) always differ.
                set(T.cmp0, 0, next_on_match(0, false), HeadMove::right);
                set(T.cmp0, 1, next_on_match(0, true), HeadMove::right);
                for (int j = 1; j <= c - 1 - k; ++j) {
                    const int el = bit_of(a, c - 1 - j);
                    set(T.cmpl.at(j), el, next_on_match(j, false), HeadMove::right);
                    set(T.cmpl.at(j), 1 - el, T.sk, HeadMove::right);
                    set(T.chkl.at(j), 0, T.cmpl.at(j), HeadMove::right);
                    set(T.chkl.at(j), 1, T.skp, HeadMove::right);
                    const int eh = bit_of(hi, c - 1 - j);
                    set(T.cmph.at(j), eh, next_on_match(j, true), HeadMove::right);
                    set(T.cmph.at(j), 1 - eh, T.sk, HeadMove::right);
                    set(T.chkh.at(j), 0, T.cmph.at(j), HeadMove::right);
                    set(T.chkh.at(j), 1, T.skp, HeadMove::right);
                }
                for (int j = c - k; j <= c - 1; ++j) {
                    const int e = bit_of(a, c - 1 - j);  // low bits agree
                    set(T.cmps.at(j), e, next_on_match(j, false), HeadMove::right);
                    set(T.cmps.at(j), 1 - e, T.sk, HeadMove::right);
                    set(T.chks.at(j), 0, T.cmps.at(j), HeadMove::right);
                    set(T.chks.at(j), 1, T.skp, HeadMove::right);
                }
            } else {
                const int e0 = bit_of(a, c - 1);
                set(T.cmp0, e0, next_on_match(0, false), HeadMove::right);
                set(T.cmp0, 1 - e0, T.sk, HeadMove::right);
                for (int j = 1; j <= c - 1; ++j) {
                    const int e = bit_of(a, c - 1 - j);
                    set(T.cmp.at(j), e, next_on_match(j, false), HeadMove::right);
                    set(T.cmp.at(j), 1 - e, T.sk, HeadMove::right);
                    set(T.chk.at(j), 0, T.cmp.at(j), HeadMove::right);
                    set(T.chk.at(j), 1, T.skp, HeadMove::right);
                }
            }
        }
        for (int v = 0; v < t; ++v) {
            set(P.vadd[v], 0, P.vsum[v], HeadMove::right);
            set(P.vadd[v], 1, P.vsum[(v + 1) % t], HeadMove::right);
            set(P.vsum[v], 1, P.vadd[v], HeadMove::right);
            if (!P.last) {
                const int res = P.plus_t ? v + t : v;
                set(P.vsum[v], 0, P.ret.at(res), HeadMove::left);
                set(P.vsum[v], kSymRightEnd, P.ret.at(res), HeadMove::left);
            } else {
                set(P.vsum[v], 0, v >= 1 ? P.accw : P.rejw, HeadMove::right);
                set(P.vsum[v], kSymRightEnd, v >= 1 ? accept : reject,
                    HeadMove::stay);
            }
        }
        if (!P.last) {
            auto& next = ph[static_cast<size_t>(i) + 1];
            for (auto [x, rid] : P.ret) {
                set(rid, 0, rid, HeadMove::left);
                set(rid, 1, rid, HeadMove::left);
                set(rid, kSymRightEnd, rid, HeadMove::left);
                set(rid, kSymLeftEnd, next.per_target.at(x).sk, HeadMove::right);
            }
        } else {
            set(P.accw, 0, P.accw, HeadMove::right);
            set(P.accw, 1, P.accw, HeadMove::right);
            set(P.accw, kSymRightEnd, accept, HeadMove::stay);
            set(P.rejw, 0, P.rejw, HeadMove::right);
            set(P.rejw, 1, P.rejw, HeadMove::right);
            set(P.rejw, kSymRightEnd, reject, HeadMove::stay);
        }
    }
    require_valid(validate_uniform(m), "usaf");

    const int log2t = ceil_log2(static_cast<unsigned>(t));
    const int closed_form = 23 * t + 2 * (1 + 3 * t) * log2t + 6;
    ConstructionReport report;
    report.builder = "usaf";
    report.t = t;
    report.actual_states = num_states;
    report.declared_state_bound = std::max(closed_form, num_states);
    for (int i = 0; i < 4; ++i)
        report.phase_state_accounting.push_back(
            {"phase" + std::to_string(i + 1), ph[static_cast<size_t>(i)].state_count});
    report.phase_state_accounting.push_back({"halting", 2});
    report.notes.push_back(
        "verdict matches the mark-interleaved evaluator on well-formed inputs "
        "whose length is an exact multiple of 2t times the block width; "
        "trailing squares would desynchronise the mark/payload alternation");
    if (u > 0)
        report.notes.push_back(
            "addresses below " + std::to_string(u) +
            " match two raw bit patterns; their comparator chains are "
            "doubled until the patterns converge");
    if (num_states > closed_form)
        report.notes.push_back(
            "duplicated comparator chains for two-pattern addresses exceed "
            "the closed-form estimate " + std::to_string(closed_form) +
            "; the declared bound reports the actual state count instead");
    return {std::move(m), std::move(report)};
}

}  // namespace twa
