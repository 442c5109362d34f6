// C ABI wrapper over the core library: opaque handles, thread-local error
// text, and JSON documents for structured results.
#include "twa/twa.h"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <variant>

#include "core/bounds.hpp"
#include "core/construct.hpp"
#include "core/markov.hpp"
#include "core/measures.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "core/simulate.hpp"
#include "core/verify.hpp"
#include "core/witness.hpp"

using json = nlohmann::ordered_json;

struct twa_machine {
    twa::AnyMachine m;
};

struct twa_oracle {
    std::unique_ptr<twa::FunctionOracle> o;
};

namespace {

thread_local std::string g_last_error = "no error";

twa_status fail(twa_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Errors raised by the core as std::invalid_argument; file problems carry a
// "cannot open"/"cannot write" prefix.
twa_status classify(const std::invalid_argument& e) {
    const std::string_view msg = e.what();
    if (msg.starts_with("cannot open") || msg.starts_with("cannot write"))
        return TWA_ERR_IO;
    if (msg.starts_with("machine document is not valid JSON"))
        return TWA_ERR_PARSE;
    return TWA_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
twa_status wrap(Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::parse_error& e) {
        return fail(TWA_ERR_PARSE, e.what());
    } catch (const nlohmann::json::exception& e) {
        // Structural problems in a request document (missing key, wrong type).
        return fail(TWA_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(classify(e), e.what());
    } catch (const std::bad_alloc&) {
        return fail(TWA_ERR_RESOURCE_LIMIT, "out of memory");
    } catch (const std::exception& e) {
        return fail(TWA_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

twa_status out_string(char** slot, const std::string& s) {
    if (!slot) return fail(TWA_ERR_INVALID_ARGUMENT, "output pointer is NULL");
    *slot = dup_string(s);
    return TWA_OK;
}

// All floats leaving this layer are rounded to 12 significant digits.
double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

twa_status need(const void* p, const char* what) {
    if (!p) return fail(TWA_ERR_INVALID_ARGUMENT, std::string(what) + " is NULL");
    return TWA_OK;
}

twa::Word parse_input(const char* input) {
    if (!input) throw std::invalid_argument("input is NULL");
    return twa::word_from_string(input);
}

const twa::NonuniformMachine& nonuniform_of(const twa_machine* m) {
    if (const auto* nm = std::get_if<twa::NonuniformMachine>(&m->m)) return *nm;
    throw std::invalid_argument("this operation needs a nonuniform machine");
}

int arity_of(const twa_machine* m, int n_flag) {
    if (const auto* nm = std::get_if<twa::NonuniformMachine>(&m->m)) {
        if (n_flag != 0 && n_flag != nm->n)
            throw std::invalid_argument("n does not match the machine input length");
        return nm->n;
    }
    if (n_flag < 1)
        throw std::invalid_argument("uniform machines need an explicit input length n");
    return n_flag;
}

json verdict_json(twa::RunOutcome out, const std::vector<twa::TraceEntry>* trace,
                  bool uniform) {
    json j;
    j["verdict"] = twa::verdict_name(out.verdict);
    j["steps"] = out.steps;
    if (trace) {
        json arr = json::array();
        for (const auto& e : *trace) {
            // Nonuniform squares are 1-based; the uniform tape already counts
            // the left endmarker as square 0.
            arr.push_back({{"state", e.state + 1}, {"square", uniform ? e.pos : e.pos + 1}});
        }
        j["trace"] = std::move(arr);
    }
    return j;
}

twa::AbsorbingChain chain_from_json(const char* text) {
    if (!text) throw std::invalid_argument("matrix JSON is NULL");
    json doc = json::parse(text);
    if (!doc.is_array() || doc.empty())
        throw std::invalid_argument("chain document must be a nonempty array of rows");
    const int m = static_cast<int>(doc.size());
    twa::AbsorbingChain c = twa::AbsorbingChain::zero(m);
    for (int i = 0; i < m; ++i) {
        const json& row = doc[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != m)
            throw std::invalid_argument("chain matrix must be square");
        for (int j = 0; j < m; ++j) {
            const json& v = row[static_cast<size_t>(j)];
            if (!v.is_number()) throw std::invalid_argument("chain entries must be numbers");
            c.at(i, j) = v.get<double>();
        }
    }
    return c;
}

twa::MachineKind kind_from_name(const char* model) {
    if (!model) throw std::invalid_argument("model is NULL");
    const std::string_view s = model;
    if (s == "det") return twa::MachineKind::det;
    if (s == "nondet") return twa::MachineKind::nondet;
    if (s == "prob") return twa::MachineKind::prob;
    throw std::invalid_argument("model must be det, nondet, or prob");
}

mpz_class mpz_from_decimal(const char* text, const char* what) {
    if (!text) throw std::invalid_argument(std::string(what) + " is NULL");
    try {
        return mpz_class(text, 10);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(std::string(what) + " is not a decimal integer");
    }
}

}  // namespace

extern "C" {

const char* twa_last_error(void) { return g_last_error.c_str(); }

void twa_string_free(char* s) { std::free(s); }

const char* twa_rng_name(void) { return twa::kRngName; }

twa_status twa_machine_from_json(const char* text, twa_machine** out) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        if (!text) throw std::invalid_argument("JSON text is NULL");
        *out = new twa_machine{twa::machine_from_json(text)};
        return TWA_OK;
    });
}

twa_status twa_machine_from_file(const char* path, twa_machine** out) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        if (!path) throw std::invalid_argument("path is NULL");
        *out = new twa_machine{twa::load_machine_file(path)};
        return TWA_OK;
    });
}

twa_status twa_machine_to_json(const twa_machine* m, int pretty, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] { return out_string(json_out, twa::machine_to_json(m->m, pretty != 0)); });
}

twa_status twa_machine_save_file(const twa_machine* m, const char* path) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        if (!path) throw std::invalid_argument("path is NULL");
        twa::save_machine_file(path, m->m);
        return TWA_OK;
    });
}

void twa_machine_free(twa_machine* m) { delete m; }

twa_status twa_machine_info(const twa_machine* m, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        json j;
        if (const auto* nm = std::get_if<twa::NonuniformMachine>(&m->m)) {
            j["uniform"] = false;
            j["kind"] = nm->kind == twa::MachineKind::det      ? "det"
                        : nm->kind == twa::MachineKind::nondet ? "nondet"
                                                               : "prob";
            j["n"] = nm->n;
            j["num_states"] = nm->num_states;
            j["initial"] = nm->initial + 1;
            j["accept"] = nm->accept + 1;
            j["reject"] = nm->reject + 1;
            j["has_shuffle"] = nm->shuffle.has_value();
        } else {
            const auto& um = std::get<twa::UniformTwoWayMachine>(m->m);
            j["uniform"] = true;
            j["kind"] = "det";
            j["num_states"] = um.num_states;
            j["initial"] = um.initial + 1;
            j["accept"] = um.accept + 1;
            j["reject"] = um.reject + 1;
        }
        return out_string(json_out, j.dump());
    });
}

twa_status twa_machine_validate(const twa_machine* m, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        json arr = json::array();
        if (const auto* nm = std::get_if<twa::NonuniformMachine>(&m->m)) {
            for (const auto& v : twa::validate_machine(*nm)) arr.push_back(v.format());
        } else {
            for (const auto& v : twa::validate_uniform(std::get<twa::UniformTwoWayMachine>(m->m)))
                arr.push_back(v.format());
        }
        return out_string(json_out, arr.dump());
    });
}

twa_status twa_build_saf(int t, int n, twa_machine** out, char** report_json) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        twa::Construction c = twa::build_saf_2da(t, n);
        if (report_json) {
            if (twa_status st = out_string(report_json, twa::report_to_json(c.report));
                st != TWA_OK)
                return st;
        }
        *out = new twa_machine{std::move(c.machine)};
        return TWA_OK;
    });
}

twa_status twa_build_usaf(int t, twa_machine** out, char** report_json) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        twa::UniformConstruction c = twa::build_usaf_2dfa(t);
        if (report_json) {
            if (twa_status st = out_string(report_json, twa::report_to_json(c.report));
                st != TWA_OK)
                return st;
        }
        *out = new twa_machine{std::move(c.machine)};
        return TWA_OK;
    });
}

twa_status twa_build_eq(int n, twa_machine** out, char** report_json) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        twa::Construction c = twa::build_eq_shuffled(n);
        if (report_json) {
            if (twa_status st = out_string(report_json, twa::report_to_json(c.report));
                st != TWA_OK)
                return st;
        }
        *out = new twa_machine{std::move(c.machine)};
        return TWA_OK;
    });
}

twa_status twa_oracle_open(const char* spec, int n, twa_oracle** out) {
    if (twa_status st = need(out, "output handle"); st != TWA_OK) return st;
    return wrap([&] {
        if (!spec) throw std::invalid_argument("oracle spec is NULL");
        *out = new twa_oracle{twa::parse_oracle_spec(spec, n)};
        return TWA_OK;
    });
}

int twa_oracle_arity(const twa_oracle* o) { return o ? o->o->arity() : 0; }

twa_status twa_oracle_eval(const twa_oracle* o, const char* bits, int* value_out) {
    if (twa_status st = need(o, "oracle"); st != TWA_OK) return st;
    if (twa_status st = need(value_out, "output pointer"); st != TWA_OK) return st;
    return wrap([&] {
        *value_out = o->o->eval(parse_input(bits));
        return TWA_OK;
    });
}

void twa_oracle_free(twa_oracle* o) { delete o; }

twa_status twa_run(const twa_machine* m, const char* input, int with_trace,
                   char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        const twa::Word w = parse_input(input);
        std::vector<twa::TraceEntry> trace;
        if (const auto* um = std::get_if<twa::UniformTwoWayMachine>(&m->m)) {
            twa::RunOutcome out = twa::run_uniform_2dfa(*um, w, with_trace ? &trace : nullptr);
            return out_string(json_out,
                              verdict_json(out, with_trace ? &trace : nullptr, true).dump());
        }
        const auto& nm = std::get<twa::NonuniformMachine>(m->m);
        switch (nm.kind) {
            case twa::MachineKind::det: {
                twa::RunOutcome out = twa::run_deterministic(nm, w, with_trace ? &trace : nullptr);
                return out_string(json_out,
                                  verdict_json(out, with_trace ? &trace : nullptr, false).dump());
            }
            case twa::MachineKind::nondet: {
                if (with_trace)
                    return fail(TWA_ERR_UNSUPPORTED,
                                "traces are only available for deterministic machines");
                twa::RunOutcome out{twa::run_nondeterministic(nm, w), -1};
                json j = verdict_json(out, nullptr, false);
                j.erase("steps");  // reachability check, no single run length
                return out_string(json_out, j.dump());
            }
            case twa::MachineKind::prob:
                return fail(TWA_ERR_UNSUPPORTED,
                            "probabilistic machines use twa_acceptance or twa_decide");
        }
        return fail(TWA_ERR_INTERNAL, "unknown machine kind");
    });
}

twa_status twa_acceptance(const twa_machine* m, const char* input, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        const auto& nm = nonuniform_of(m);
        const twa::Word w = parse_input(input);
        twa::AcceptanceProbability ap = twa::acceptance_probability(nm, w);
        twa::ExpectedTime et = twa::expected_running_time(nm, w);
        json j;
        j["accept"] = round12(ap.accept);
        j["reject"] = round12(ap.reject);
        j["nonhalting"] = round12(ap.nonhalting);
        if (et.infinite)
            j["expected_time"] = nullptr;
        else
            j["expected_time"] = round12(et.value);
        j["solver_warning"] = ap.solver_warning;
        return out_string(json_out, j.dump());
    });
}

twa_status twa_decide(const twa_machine* m, const char* input, double eps,
                      char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        const auto& nm = nonuniform_of(m);
        json j;
        j["decision"] = twa::decision_name(twa::decide_probabilistic(nm, parse_input(input), eps));
        return out_string(json_out, j.dump());
    });
}

twa_status twa_verify(const twa_machine* m, const char* oracle_spec, int n,
                      uint64_t samples, uint64_t seed, int jobs, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        if (!oracle_spec) throw std::invalid_argument("oracle spec is NULL");
        const int arity = arity_of(m, n);
        if (samples == 0 && arity > 26)
            return fail(TWA_ERR_RESOURCE_LIMIT,
                        "exhaustive verification supports n <= 26; use samples");
        auto oracle = twa::parse_oracle_spec(oracle_spec, arity);
        twa::VerifyPlan plan{samples, seed, jobs};
        twa::InputSampler sampler = twa::uniform_sampler();
        twa::DomainFilter domain = twa::accept_all_inputs();
        const std::string_view spec_view(oracle_spec);
        if (spec_view.starts_with("usaf:")) {
            // The mark-annotated machine is only promised on well-formed
            // inputs, so sampling and minimization stay inside that set.
            const size_t eq = spec_view.find('=');
            const int t = std::stoi(std::string(spec_view.substr(eq + 1)));
            const twa::UsafParams pr = twa::usaf_params(arity, t);
            sampler = twa::usaf_wellformed_sampler(pr);
            domain = twa::usaf_wellformed_filter(pr);
        }
        twa::VerifyReport rep = twa::run_verify(m->m, *oracle, plan, sampler, domain);
        json j;
        j["mode"] = rep.mode;
        j["oracle"] = oracle->describe();
        j["rng"] = twa::kRngName;
        j["total"] = rep.total;
        j["mismatches"] = rep.mismatches;
        j["diverges"] = rep.diverges;
        j["max_steps"] = rep.max_steps;
        j["seed"] = rep.seed;
        j["pass"] = rep.pass;
        json arr = json::array();
        for (const auto& c : rep.counterexamples)
            arr.push_back({{"input", c.input}, {"expected", c.expected}, {"got", c.got}});
        j["counterexamples"] = std::move(arr);
        return out_string(json_out, j.dump());
    });
}

twa_status twa_measure(const char* request_json, char** json_out) {
    return wrap([&] {
        if (!request_json) throw std::invalid_argument("request is NULL");
        const json req = json::parse(request_json);
        const int n = req.at("n").get<int>();
        auto oracle = twa::parse_oracle_spec(req.at("oracle").get<std::string>(), n);
        const uint64_t seed = req.value("seed", uint64_t{0});

        const std::string order_spec = req.value("order", "id");
        twa::VariableOrder order;
        json search_value;
        if (order_spec == "id") {
            order = twa::identity_order(n);
        } else if (order_spec.starts_with("perm:")) {
            for (size_t pos = 5; pos < order_spec.size();) {
                size_t comma = order_spec.find(',', pos);
                if (comma == std::string::npos) comma = order_spec.size();
                order.push_back(std::stoi(order_spec.substr(pos, comma - pos)) - 1);
                pos = comma + 1;
            }
            if (!twa::is_valid_order(order, n))
                throw std::invalid_argument("variable order must be a permutation of 1..n");
        } else if (order_spec == "search:exhaustive") {
            twa::OrderSearchResult r = twa::min_subfunctions_exhaustive(*oracle);
            order = r.order;
            search_value = r.value;
        } else if (order_spec == "search:heuristic") {
            twa::OrderSearchResult r = twa::min_subfunctions_heuristic(*oracle, seed);
            order = r.order;
            search_value = r.value;
        } else {
            throw std::invalid_argument(
                "order must be id, perm:<csv>, search:exhaustive, or search:heuristic");
        }

        std::vector<int> splits;
        const json split = req.value("split", json("all"));
        if (split.is_string() && split.get<std::string>() == "all") {
            for (int i = 1; i < n; ++i) splits.push_back(i);
        } else if (split.is_number_integer()) {
            splits.push_back(split.get<int>());
        } else {
            throw std::invalid_argument("split must be \"all\" or an integer");
        }

        json j;
        j["oracle"] = oracle->describe();
        j["n"] = n;
        json order_json = json::array();
        for (int v : order) order_json.push_back(v + 1);
        j["order"] = std::move(order_json);
        if (!search_value.is_null()) j["search_value"] = search_value;
        uint64_t max_count = 0;
        json rows = json::array();
        if (req.contains("sampled")) {
            const json& s = req.at("sampled");
            const uint64_t prefixes = s.at("prefixes").get<uint64_t>();
            const int probes = s.at("probes").get<int>();
            j["sampled"] = {{"prefixes", prefixes}, {"probes", probes}, {"seed", seed}};
            j["rng"] = twa::kRngName;
            for (int i : splits) {
                const uint64_t count = twa::sampled_subfunction_lower_bound(
                    *oracle, order, i, prefixes, probes, seed);
                rows.push_back({{"split", i}, {"count", count}});
                max_count = std::max(max_count, count);
            }
        } else {
            for (int i : splits) {
                const uint64_t count = twa::count_subfunctions(*oracle, order, i);
                rows.push_back({{"split", i}, {"count", count}});
                max_count = std::max(max_count, count);
            }
        }
        j["splits"] = std::move(rows);
        j["max"] = max_count;
        return out_string(json_out, j.dump());
    });
}

twa_status twa_size_bound(const char* model, int d, uint64_t T, double eps,
                          char** decimal_out) {
    return wrap([&] {
        return out_string(decimal_out, twa::size_bound(kind_from_name(model), d, T, eps).get_str());
    });
}

twa_status twa_size_bound_simplified(int d, uint64_t T, char** decimal_out) {
    return wrap([&] {
        return out_string(decimal_out, twa::prob_size_bound_simplified(d, T).get_str());
    });
}

twa_status twa_min_size_lower_bound(const char* model, const char* n_decimal,
                                    uint64_t T, double eps, int* d_out) {
    if (twa_status st = need(d_out, "output pointer"); st != TWA_OK) return st;
    return wrap([&] {
        *d_out = twa::min_size_lower_bound(kind_from_name(model),
                                           mpz_from_decimal(n_decimal, "N"), T, eps);
        return TWA_OK;
    });
}

twa_status twa_hierarchy_report(int d_lo, int d_hi, const char* n_decimal,
                                uint64_t T, char** json_out) {
    return wrap([&] {
        auto rows = twa::hierarchy_report(d_lo, d_hi, mpz_from_decimal(n_decimal, "n"), T);
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"family", r.family},
                           {"d", r.d},
                           {"guard_satisfied", r.guard_satisfied},
                           {"guard", r.guard},
                           {"small_class", r.small_class},
                           {"large_class", r.large_class}});
        return out_string(json_out, arr.dump());
    });
}

twa_status twa_chain_analyze(const char* matrix_json, char** json_out) {
    return wrap([&] {
        twa::AbsorbingChain c = chain_from_json(matrix_json);
        json j;
        j["m"] = c.m;
        auto bad = twa::validate_chain(c);
        j["valid"] = bad.empty();
        j["violations"] = bad;
        if (bad.empty()) {
            j["absorption"] = round12(twa::absorption_probability(c));
            twa::AbsorptionTime t = twa::expected_absorption_time(c);
            if (t.infinite)
                j["expected_time"] = nullptr;
            else
                j["expected_time"] = round12(t.value);
        }
        return out_string(json_out, j.dump());
    });
}

twa_status twa_crossing_report(const twa_machine* m, const char* input, int split,
                               double tol, int with_matrix, char** json_out) {
    if (twa_status st = need(m, "machine"); st != TWA_OK) return st;
    return wrap([&] {
        const auto& nm = nonuniform_of(m);
        const twa::Word w = parse_input(input);
        twa::CrossingReport rep = twa::verify_crossing_identity(nm, w, split, tol);
        json j;
        j["split"] = rep.split;
        j["simulator_accept"] = round12(rep.simulator_accept);
        j["crossing_accept"] = round12(rep.crossing_accept);
        j["power_accumulated"] = round12(rep.power_accumulated);
        j["t_used"] = rep.t_used;
        j["tol"] = rep.tol;
        j["agreed"] = rep.agreed;
        j["converged"] = rep.converged;
        if (with_matrix) {
            twa::BoundaryVectors vecs;
            twa::CrossingMatrix cm = twa::crossing_matrix(nm, w, split, &vecs);
            json rows = json::array();
            for (int i = 0; i < cm.dim; ++i) {
                json row = json::array();
                for (int k = 0; k < cm.dim; ++k) row.push_back(round12(cm.at(i, k)));
                rows.push_back(std::move(row));
            }
            j["matrix"] = std::move(rows);
            j["start"] = vecs.start;
            j["accept_vector"] = vecs.accept;
        }
        return out_string(json_out, j.dump());
    });
}

twa_status twa_betaclose_lemma(const char* p_json, const char* pprime_json,
                               double eps, char** json_out) {
    return wrap([&] {
        twa::AbsorbingChain p = chain_from_json(p_json);
        twa::AbsorbingChain pp = chain_from_json(pprime_json);
        twa::BetaCloseReport rep = twa::check_betaclose_lemma(p, pp, eps);
        json j;
        j["precondition_ok"] = rep.precondition_ok;
        j["a_p"] = round12(rep.a_p);
        j["a_pprime"] = round12(rep.a_pprime);
        j["t_used"] = round12(rep.t_used);
        j["lambda"] = round12(rep.lambda);
        j["beta"] = round12(rep.beta);
        j["gate_holds"] = rep.gate_holds;
        j["intermediate"] = round12(rep.intermediate);
        j["conclusion_holds"] = rep.conclusion_holds;
        j["margin"] = round12(rep.margin);
        return out_string(json_out, j.dump());
    });
}

}  // extern "C"
