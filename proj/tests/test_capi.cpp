// End-to-end exercise of the shared-library C interface: round trips, every
// operation family, and the error-code contract.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstring>
#include <string>

#include "twa/twa.h"

using nlohmann::json;

namespace {

// Takes ownership of the C string.
std::string take(char* s) {
    REQUIRE(s != nullptr);
    std::string out(s);
    twa_string_free(s);
    return out;
}

struct MachineHandle {
    twa_machine* m = nullptr;
    ~MachineHandle() { twa_machine_free(m); }
};

void build_eq8(MachineHandle& h) {
    char* report = nullptr;
    REQUIRE(twa_build_eq(8, &h.m, &report) == TWA_OK);
    twa_string_free(report);
}

}  // namespace

TEST_CASE("library identity strings") {
    CHECK(twa_last_error() != nullptr);
    CHECK(std::string(twa_rng_name()) == "xoshiro256** (splitmix64 seeding)");
}

TEST_CASE("builders return machines and reports") {
    MachineHandle saf;
    char* report = nullptr;
    REQUIRE(twa_build_saf(2, 25, &saf.m, &report) == TWA_OK);
    const json rep = json::parse(take(report));
    CHECK(rep.at("builder") == "saf");
    CHECK(rep.at("actual_states") == 25);
    CHECK(rep.at("declared_state_bound") == 30);
    CHECK(rep.at("actual_states").get<int>() <= rep.at("declared_state_bound").get<int>());

    char* info = nullptr;
    REQUIRE(twa_machine_info(saf.m, &info) == TWA_OK);
    const json i = json::parse(take(info));
    CHECK(i.at("uniform") == false);
    CHECK(i.at("kind") == "det");
    CHECK(i.at("n") == 25);
    CHECK(i.at("num_states") == 25);
    CHECK(i.at("has_shuffle") == false);

    char* violations = nullptr;
    REQUIRE(twa_machine_validate(saf.m, &violations) == TWA_OK);
    CHECK(json::parse(take(violations)).empty());

    MachineHandle usaf;
    REQUIRE(twa_build_usaf(2, &usaf.m, &report) == TWA_OK);
    const json urep = json::parse(take(report));
    CHECK(urep.at("actual_states") == 61);
    CHECK(urep.at("declared_state_bound") == 66);
    char* uinfo = nullptr;
    REQUIRE(twa_machine_info(usaf.m, &uinfo) == TWA_OK);
    const json ui = json::parse(take(uinfo));
    CHECK(ui.at("uniform") == true);
    CHECK_FALSE(ui.contains("n"));

    // Bad parameters surface as INVALID_ARGUMENT with a message.
    twa_machine* out = nullptr;
    CHECK(twa_build_saf(2, 24, &out, nullptr) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(twa_last_error()) > 0);
}

TEST_CASE("machine JSON and file round trips with error codes") {
    MachineHandle eq;
    build_eq8(eq);
    char* doc = nullptr;
    REQUIRE(twa_machine_to_json(eq.m, 0, &doc) == TWA_OK);
    const std::string text = take(doc);

    twa_machine* back = nullptr;
    REQUIRE(twa_machine_from_json(text.c_str(), &back) == TWA_OK);
    char* doc2 = nullptr;
    REQUIRE(twa_machine_to_json(back, 0, &doc2) == TWA_OK);
    CHECK(take(doc2) == text);
    twa_machine_free(back);

    CHECK(twa_machine_from_json("{ not json", &back) == TWA_ERR_PARSE);
    CHECK(twa_machine_from_json("{\"kind\":\"det\"}", &back) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(twa_machine_from_json(nullptr, &back) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(twa_machine_from_json(text.c_str(), nullptr) == TWA_ERR_INVALID_ARGUMENT);

    const char* path = "capi_machine.json";
    REQUIRE(twa_machine_save_file(eq.m, path) == TWA_OK);
    REQUIRE(twa_machine_from_file(path, &back) == TWA_OK);
    twa_machine_free(back);
    std::remove(path);
    CHECK(twa_machine_from_file("no-such-file.json", &back) == TWA_ERR_IO);
    CHECK(twa_machine_save_file(eq.m, "missing-dir/x.json") == TWA_ERR_IO);
}

TEST_CASE("oracles evaluate through the C surface") {
    twa_oracle* o = nullptr;
    REQUIRE(twa_oracle_open("eq", 8, &o) == TWA_OK);
    CHECK(twa_oracle_arity(o) == 8);
    int value = -1;
    REQUIRE(twa_oracle_eval(o, "11100000", &value) == TWA_OK);
    CHECK(value == 1);
    REQUIRE(twa_oracle_eval(o, "11110000", &value) == TWA_OK);
    CHECK(value == 0);
    CHECK(twa_oracle_eval(o, "123", &value) == TWA_ERR_INVALID_ARGUMENT);
    twa_oracle_free(o);
    CHECK(twa_oracle_open("nope", 8, &o) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(twa_oracle_open("table:missing.txt", 8, &o) == TWA_ERR_IO);
}

TEST_CASE("running machines: verdicts, traces, probabilistic analytics") {
    MachineHandle eq;
    build_eq8(eq);
    char* out = nullptr;
    REQUIRE(twa_run(eq.m, "11100000", 1, &out) == TWA_OK);
    const json run = json::parse(take(out));
    CHECK(run.at("verdict") == "accept");
    CHECK(run.at("steps").get<long>() > 0);
    REQUIRE(run.contains("trace"));
    CHECK(run.at("trace").front().at("square") == 1);
    CHECK(run.at("trace").front().at("state") == 1);

    REQUIRE(twa_run(eq.m, "11110000", 0, &out) == TWA_OK);
    CHECK(json::parse(take(out)).at("verdict") == "reject");
    CHECK(twa_run(eq.m, "111", 0, &out) == TWA_ERR_INVALID_ARGUMENT);

    // A fair-coin machine: step right with probability 1/2, else stay;
    // accept on arrival at the second square.
    const char* coin = R"({
        "kind": "prob", "n": 2, "num_states": 3,
        "initial": 1, "accept": 2, "reject": 3,
        "transitions": [
            [ {"state": 1, "symbol": "0",
               "to": [{"state": 1, "move": "S", "prob": "0.5"},
                       {"state": 1, "move": "R", "prob": "0.5"}]},
              {"state": 1, "symbol": "1",
               "to": [{"state": 1, "move": "S", "prob": "0.5"},
                       {"state": 1, "move": "R", "prob": "0.5"}]} ],
            [ {"state": 1, "symbol": "0", "to": [{"state": 2, "move": "S"}]},
              {"state": 1, "symbol": "1", "to": [{"state": 2, "move": "S"}]} ]
        ]
    })";
    twa_machine* pm = nullptr;
    REQUIRE(twa_machine_from_json(coin, &pm) == TWA_OK);
    MachineHandle prob;
    prob.m = pm;
    CHECK(twa_run(pm, "00", 0, &out) == TWA_ERR_UNSUPPORTED);
    REQUIRE(twa_acceptance(pm, "00", &out) == TWA_OK);
    const json acc = json::parse(take(out));
    CHECK(acc.at("accept").get<double>() == doctest::Approx(1.0));
    CHECK(acc.at("expected_time").get<double>() == doctest::Approx(3.0));
    REQUIRE(twa_decide(pm, "00", 0.2, &out) == TWA_OK);
    CHECK(json::parse(take(out)).at("decision") == "accept");
}

TEST_CASE("verification: exhaustive pass, JSON shape, resource guard") {
    MachineHandle eq;
    build_eq8(eq);
    char* out = nullptr;
    REQUIRE(twa_verify(eq.m, "eq", 0, 0, 0, 2, &out) == TWA_OK);
    const json rep = json::parse(take(out));
    CHECK(rep.at("mode") == "exhaustive");
    CHECK(rep.at("total") == 256);
    CHECK(rep.at("pass") == true);
    CHECK(rep.at("mismatches") == 0);
    CHECK(rep.at("diverges") == 0);
    CHECK(rep.at("counterexamples").empty());
    CHECK(rep.at("rng") == "xoshiro256** (splitmix64 seeding)");
    CHECK(rep.at("oracle") == "eq,n=8");
    CHECK_FALSE(rep.contains("seconds"));

    // Arity comes from the machine; a conflicting n is rejected.
    CHECK(twa_verify(eq.m, "eq", 9, 0, 0, 1, &out) == TWA_ERR_INVALID_ARGUMENT);

    MachineHandle wide;
    char* report = nullptr;
    REQUIRE(twa_build_saf(2, 29, &wide.m, &report) == TWA_OK);
    twa_string_free(report);
    CHECK(twa_verify(wide.m, "saf:t=2", 0, 0, 0, 1, &out) == TWA_ERR_RESOURCE_LIMIT);
    REQUIRE(twa_verify(wide.m, "saf:t=2", 0, 5000, 3, 2, &out) == TWA_OK);
    const json sampled = json::parse(take(out));
    CHECK(sampled.at("mode") == "sampled");
    CHECK(sampled.at("pass") == true);
    CHECK(sampled.at("seed") == 3);

    // Uniform machines need the explicit arity.
    MachineHandle usaf;
    REQUIRE(twa_build_usaf(2, &usaf.m, &report) == TWA_OK);
    twa_string_free(report);
    CHECK(twa_verify(usaf.m, "usaf:t=2", 0, 1000, 1, 1, &out) ==
          TWA_ERR_INVALID_ARGUMENT);
    REQUIRE(twa_verify(usaf.m, "usaf:t=2", 56, 1000, 1, 1, &out) == TWA_OK);
    CHECK(json::parse(take(out)).at("pass") == true);
}

TEST_CASE("measures over the request/response documents") {
    char* out = nullptr;
    REQUIRE(twa_measure(R"({"oracle":"eq","n":6,"order":"id","split":"all"})", &out) ==
            TWA_OK);
    const json m = json::parse(take(out));
    CHECK(m.at("max") == 8);
    CHECK(m.at("splits").size() == 5);
    CHECK(m.at("order") == json({1, 2, 3, 4, 5, 6}));

    REQUIRE(twa_measure(R"({"oracle":"eq","n":4,"order":"perm:1,3,2,4","split":3})",
                        &out) == TWA_OK);
    const json p = json::parse(take(out));
    CHECK(p.at("max") == 3);
    CHECK(p.at("splits").size() == 1);
    CHECK(p.at("splits").front().at("split") == 3);

    REQUIRE(twa_measure(R"({"oracle":"eq","n":6,"order":"search:exhaustive"})", &out) ==
            TWA_OK);
    CHECK(json::parse(take(out)).at("search_value") == 3);

    REQUIRE(twa_measure(
                R"({"oracle":"saf:t=2","n":25,"order":"id","split":12,
                    "sampled":{"prefixes":200,"probes":32},"seed":7})",
                &out) == TWA_OK);
    const json s = json::parse(take(out));
    CHECK(s.at("sampled").at("prefixes") == 200);
    CHECK(s.at("sampled").at("probes") == 32);
    CHECK(s.at("sampled").at("seed") == 7);
    CHECK(s.at("splits").front().at("count").get<int>() >= 2);
    CHECK(s.at("rng") == "xoshiro256** (splitmix64 seeding)");

    CHECK(twa_measure("{ nope", &out) == TWA_ERR_PARSE);
    CHECK(twa_measure(R"({"n":6,"order":"id"})", &out) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(twa_measure(nullptr, &out) == TWA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("size bounds and hierarchy rows as decimal strings") {
    char* out = nullptr;
    REQUIRE(twa_size_bound("det", 4, 256, 0.2, &out) == TWA_OK);
    CHECK(take(out) == "3125");
    REQUIRE(twa_size_bound("nondet", 2, 256, 0.2, &out) == TWA_OK);
    CHECK(take(out) == "512");
    REQUIRE(twa_size_bound_simplified(2, 256, &out) == TWA_OK);
    CHECK(take(out) == "2417851639229258349412352");  // 512^9 = 2^81
    CHECK(twa_size_bound("laser", 4, 256, 0.2, &out) == TWA_ERR_INVALID_ARGUMENT);

    int d = 0;
    REQUIRE(twa_min_size_lower_bound("det", "1024", 256, 0.2, &d) == TWA_OK);
    CHECK(d == 4);
    REQUIRE(twa_min_size_lower_bound("nondet", "65536", 256, 0.2, &d) == TWA_OK);
    CHECK(d == 3);
    CHECK(twa_min_size_lower_bound("det", "12x", 256, 0.2, &d) ==
          TWA_ERR_INVALID_ARGUMENT);

    REQUIRE(twa_hierarchy_report(3, 3, "50000", 256, &out) == TWA_OK);
    const json rows = json::parse(take(out));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].at("family") == "det");
    CHECK(rows[0].at("guard_satisfied") == true);
    CHECK(rows[0].at("small_class") == "3");
    CHECK(rows[0].at("large_class") == "82");
    CHECK(twa_hierarchy_report(3, 3, "50000", 255, &out) == TWA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("chain analysis, crossing reports, and the robustness check") {
    char* out = nullptr;
    const char* chain = "[[0.5,0.2,0.3],[0,1,0],[0,0,1]]";
    REQUIRE(twa_chain_analyze(chain, &out) == TWA_OK);
    const json c = json::parse(take(out));
    CHECK(c.at("m") == 3);
    CHECK(c.at("valid") == true);
    CHECK(c.at("absorption").get<double>() == doctest::Approx(0.6));
    CHECK(c.at("expected_time").get<double>() == doctest::Approx(2.0));

    REQUIRE(twa_chain_analyze("[[0.5,0.2,0.2],[0,1,0],[0,0,1]]", &out) == TWA_OK);
    const json bad = json::parse(take(out));
    CHECK(bad.at("valid") == false);
    CHECK_FALSE(bad.at("violations").empty());
    CHECK(twa_chain_analyze("[[1,2],[3]]", &out) == TWA_ERR_INVALID_ARGUMENT);
    CHECK(twa_chain_analyze("oops", &out) == TWA_ERR_PARSE);

    MachineHandle eq;
    build_eq8(eq);
    REQUIRE(twa_crossing_report(eq.m, "10110100", 4, 1e-6, 1, &out) == TWA_OK);
    const json cr = json::parse(take(out));
    CHECK(cr.at("split") == 4);
    CHECK(cr.at("agreed") == true);
    CHECK(cr.at("converged") == true);
    const size_t dim = 2 * 5 + 3;
    REQUIRE(cr.contains("matrix"));
    CHECK(cr.at("matrix").size() == dim);
    CHECK(cr.at("matrix").front().size() == dim);
    CHECK(twa_crossing_report(eq.m, "10110100", 8, 1e-6, 0, &out) ==
          TWA_ERR_INVALID_ARGUMENT);

    REQUIRE(twa_betaclose_lemma("[[0.2,0.1,0.7],[0,1,0],[0,0,1]]",
                                "[[0.2,0.1,0.7],[0,1,0],[0,0,1]]", 0.2,
                                &out) == TWA_OK);
    const json bc = json::parse(take(out));
    CHECK(bc.at("precondition_ok") == true);
    CHECK(bc.at("gate_holds") == true);
    CHECK(bc.at("conclusion_holds") == true);
    CHECK(bc.at("margin").get<double>() > 0.0);
    CHECK(twa_betaclose_lemma(chain, chain, 0.9, &out) == TWA_ERR_INVALID_ARGUMENT);
}
