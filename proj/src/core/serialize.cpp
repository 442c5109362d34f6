#include "serialize.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twa {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kind_name(MachineKind k) {
    switch (k) {
        case MachineKind::det: return "det";
        case MachineKind::nondet: return "nondet";
        default: return "prob";
    }
}

MachineKind kind_from(const std::string& s) {
    if (s == "det") return MachineKind::det;
    if (s == "nondet") return MachineKind::nondet;
    if (s == "prob") return MachineKind::prob;
    throw std::invalid_argument("unknown machine kind: " + s);
}

const char* move_name(HeadMove m) {
    switch (m) {
        case HeadMove::left: return "L";
        case HeadMove::stay: return "S";
        default: return "R";
    }
}

HeadMove move_from(const std::string& s) {
    if (s == "L") return HeadMove::left;
    if (s == "S") return HeadMove::stay;
    if (s == "R") return HeadMove::right;
    throw std::invalid_argument("unknown head move: " + s);
}

std::string prob_str(double p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

const char* sym_name(int sym) {
    switch (sym) {
        case kSymZero: return "0";
        case kSymOne: return "1";
        case kSymLeftEnd: return "<";
        default: return ">";
    }
}

int sym_from(const std::string& s, bool uniform) {
    if (s == "0") return kSymZero;
    if (s == "1") return kSymOne;
    if (uniform && s == "<") return kSymLeftEnd;
    if (uniform && s == ">") return kSymRightEnd;
    throw std::invalid_argument("unknown symbol: " + s);
}

ordered_json targets_to_json(const TargetList& ts, bool with_prob) {
    ordered_json arr = ordered_json::array();
    for (const TransitionTarget& t : ts) {
        ordered_json o;
        o["state"] = t.state + 1;
        o["move"] = move_name(t.move);
        if (with_prob) o["prob"] = prob_str(t.prob);
        arr.push_back(std::move(o));
    }
    return arr;
}

TargetList targets_from_json(const ordered_json& arr, int num_states) {
    if (!arr.is_array()) throw std::invalid_argument("\"to\" must be an array");
    TargetList ts;
    for (const auto& o : arr) {
        TransitionTarget t;
        const int state1 = o.at("state").get<int>();
        if (state1 < 1 || state1 > num_states)
            throw std::invalid_argument("target state out of range");
        t.state = state1 - 1;
        t.move = move_from(o.at("move").get<std::string>());
        if (o.contains("prob")) {
            const auto& p = o.at("prob");
            t.prob = p.is_string() ? std::stod(p.get<std::string>()) : p.get<double>();
        }
        ts.push_back(t);
    }
    return ts;
}

void header_to_json(ordered_json& j, MachineKind kind, int num_states, int initial,
                    int accept, int reject) {
    j["kind"] = kind_name(kind);
    j["num_states"] = num_states;
    j["initial"] = initial + 1;
    j["accept"] = accept + 1;
    j["reject"] = reject + 1;
}

}  // namespace

std::string machine_to_json(const NonuniformMachine& m, bool pretty) {
    ordered_json j;
    j["kind"] = kind_name(m.kind);
    j["n"] = m.n;
    header_to_json(j, m.kind, m.num_states, m.initial, m.accept, m.reject);
    if (m.shuffle) {
        ordered_json arr = ordered_json::array();
        for (int v : m.shuffle->to_square) arr.push_back(v + 1);
        j["shuffle"] = std::move(arr);
    }
    ordered_json tables = ordered_json::array();
    for (int pos = 0; pos < m.n; ++pos) {
        ordered_json table = ordered_json::array();
        for (int s = 0; s < m.num_states; ++s) {
            if (m.is_halting(s)) continue;
            for (int sym = 0; sym < 2; ++sym) {
                ordered_json e;
                e["state"] = s + 1;
                e["symbol"] = sym_name(sym);
                e["to"] = targets_to_json(m.at(pos, s, sym), m.kind == MachineKind::prob);
                table.push_back(std::move(e));
            }
        }
        tables.push_back(std::move(table));
    }
    j["transitions"] = std::move(tables);
    return pretty ? j.dump(2) : j.dump();
}

std::string machine_to_json(const UniformTwoWayMachine& m, bool pretty) {
    ordered_json j;
    header_to_json(j, m.kind, m.num_states, m.initial, m.accept, m.reject);
    ordered_json table = ordered_json::array();
    for (int s = 0; s < m.num_states; ++s) {
        if (m.is_halting(s)) continue;
        for (int sym = 0; sym < kUniformSyms; ++sym) {
            ordered_json e;
            e["state"] = s + 1;
            e["symbol"] = sym_name(sym);
            e["to"] = targets_to_json(m.at(s, sym), false);
            table.push_back(std::move(e));
        }
    }
    j["transitions"] = std::move(table);
    return pretty ? j.dump(2) : j.dump();
}

std::string machine_to_json(const AnyMachine& m, bool pretty) {
    return std::visit([&](const auto& v) { return machine_to_json(v, pretty); }, m);
}

namespace {

AnyMachine machine_from_parsed(const ordered_json& j) {
    const MachineKind kind = kind_from(j.at("kind").get<std::string>());
    const int num_states = j.at("num_states").get<int>();
    if (num_states < 1 || num_states > 1'000'000)
        throw std::invalid_argument("num_states out of range");
    const int initial = j.at("initial").get<int>() - 1;
    const int accept = j.at("accept").get<int>() - 1;
    const int reject = j.at("reject").get<int>() - 1;

    if (!j.contains("n")) {
        UniformTwoWayMachine m = UniformTwoWayMachine::make(kind, num_states, initial,
                                                            accept, reject);
        for (const auto& e : j.at("transitions")) {
            const int s = e.at("state").get<int>() - 1;
            if (s < 0 || s >= num_states)
                throw std::invalid_argument("table state out of range");
            const int sym = sym_from(e.at("symbol").get<std::string>(), true);
            m.at(s, sym) = targets_from_json(e.at("to"), num_states);
        }
        return m;
    }

    const int n = j.at("n").get<int>();
    if (n < 1 || n > 1'000'000) throw std::invalid_argument("n out of range");
    NonuniformMachine m = NonuniformMachine::make(kind, n, num_states, initial, accept, reject);
    if (j.contains("shuffle")) {
        ShufflePermutation theta;
        for (const auto& v : j.at("shuffle")) {
            const int sq = v.get<int>() - 1;
            if (sq < 0 || sq >= n) throw std::invalid_argument("shuffle square out of range");
            theta.to_square.push_back(sq);
        }
        if (static_cast<int>(theta.to_square.size()) != n)
            throw std::invalid_argument("shuffle must list every input symbol");
        m.shuffle = std::move(theta);
    }
    const auto& tables = j.at("transitions");
    if (!tables.is_array() || static_cast<int>(tables.size()) != n)
        throw std::invalid_argument("transitions must hold one table per square");
    for (int pos = 0; pos < n; ++pos) {
        for (const auto& e : tables[static_cast<size_t>(pos)]) {
            const int s = e.at("state").get<int>() - 1;
            if (s < 0 || s >= num_states)
                throw std::invalid_argument("table state out of range");
            const int sym = sym_from(e.at("symbol").get<std::string>(), false);
            m.at(pos, s, sym) = targets_from_json(e.at("to"), num_states);
        }
    }
    return m;
}

}  // namespace

AnyMachine machine_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("machine document is not valid JSON: ") + e.what());
    }
    try {
        return machine_from_parsed(j);
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument(std::string("malformed machine document: ") + e.what());
    }
}

AnyMachine load_machine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open machine file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return machine_from_json(ss.str());
}

void save_machine_file(const std::string& path, const AnyMachine& m) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write machine file: " + path);
    out << machine_to_json(m, true) << '\n';
    if (!out) throw std::invalid_argument("failed writing machine file: " + path);
}

}  // namespace twa
