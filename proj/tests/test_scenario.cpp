#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mcflab/scenario.hpp"

using namespace mcflab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("mcflab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config defaults fill in per scenario") {
    auto c = parse_config(R"({"scenario": "csf_pair"})");
    CHECK(c.scenario == ScenarioKind::CsfPair);
    CHECK(c.resolution == 0.02);
    CHECK(c.horizon == 0.45);
    CHECK(c.sample_dt == 0.01);
    CHECK(c.seed == 1);
    CHECK(c.params.at("radius_a") == 1.0);
    CHECK(c.params.at("separation") == 1.0);

    auto l = parse_config(R"({"scenario": "localizability", "variant": "dumbbell"})");
    CHECK(l.resolution == 192);  // finer default so the neck pinch resolves

    auto m = parse_config(R"({"scenario": "marriage_ring"})");
    CHECK(m.params.at("n") == 2.0);
    CHECK(m.sample_dt == 0.0002);
}

TEST_CASE("config rejections carry the pinned messages") {
    using doctest::Contains;
    CHECK_THROWS_WITH_AS(parse_config("{nope"), Contains("config-parse"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "warp_drive"})"),
                         Contains("config-invalid"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "bogus": 1})"),
                         Contains("unknown key"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "horizon": -1})"),
                         Contains("horizon must be positive"), SimError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"scenario": "csf_pair", "horizon": 0.4, "sample_dt": 0.2})"),
        Contains("sample_dt must lie in (0, horizon/4]"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "sample_dt": 0})"),
                         Contains("sample_dt must lie in (0, horizon/4]"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_self", "variant": "pentagram"})"),
                         Contains("variant"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "variant": "anything"})"),
                         Contains("variant"), SimError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"scenario": "csf_pair", "params": {"warp": 9}})"),
        Contains("param"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "seed": -3})"),
                         Contains("seed"), SimError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"scenario": "marriage_ring", "params": {"n": 7}})"),
        Contains("config-invalid"), SimError);
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"scenario": "cone_fattening", "params": {"aperture_deg": 95}})"),
        Contains("aperture"), SimError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "csf_pair", "resolution": 1e9})"),
                         Contains("resolution"), SimError);
}

TEST_CASE("serialize/parse is an exact round trip for every scenario") {
    for (const char* name : {"csf_pair", "csf_self", "graphical_pair", "marriage_ring",
                             "dumbbell", "cone_fattening", "localizability", "custom"}) {
        auto c = parse_config(std::string("{\"scenario\": \"") + name + "\"}");
        auto c2 = parse_config(serialize_config(c));
        CHECK(c == c2);
    }
    auto full = parse_config(R"({
        "scenario": "cone_fattening", "resolution": 96, "horizon": 0.05,
        "sample_dt": 0.0125, "seed": 42, "output_dir": "somewhere/else",
        "emit_frames": true, "params": {"aperture_deg": 60, "plane_offset": 0.05}
    })");
    auto full2 = parse_config(serialize_config(full));
    CHECK(full == full2);
    CHECK(full.emit_frames);
    CHECK(full.params.at("aperture_deg") == 60.0);
}

TEST_CASE("verdict JSON carries tri-state fields and notes") {
    Verdict v;
    v.scenario = "csf_self:figure_eight";
    v.monotone_count = true;
    v.fattening = std::nullopt;
    v.t0_detected = 0.125;
    v.notes.push_back({3, "transient-increase", "count rose once"});
    v.tolerances.push_back({"link_radius", 0.04});
    const std::string j = verdict_to_json(v);
    CHECK(j.find("\"schema\": \"1\"") != std::string::npos);
    CHECK(j.find("\"scenario\": \"csf_self:figure_eight\"") != std::string::npos);
    CHECK(j.find("\"monotone_count\": true") != std::string::npos);
    CHECK(j.find("\"monotone_dim\": \"n/a\"") != std::string::npos);
    CHECK(j.find("\"fattening\": \"n/a\"") != std::string::npos);
    CHECK(j.find("\"t0_detected\": 0.125") != std::string::npos);
    CHECK(j.find("\"tag\": \"transient-increase\"") != std::string::npos);
    CHECK(j.find("\"link_radius\": 0.04") != std::string::npos);

    Verdict none;
    none.scenario = "custom";
    CHECK(verdict_to_json(none).find("\"t0_detected\": \"none\"") != std::string::npos);
}

TEST_CASE("bundled expectations text matches the shipped data file") {
    const fs::path data =
        fs::path(__FILE__).parent_path().parent_path() / "data" / "expectations.json";
    REQUIRE(fs::exists(data));
    CHECK(slurp(data) == default_expectations_json());
}

TEST_CASE("report buckets pass, expected-fail, and unexpected-fail") {
    Verdict good;
    good.scenario = "csf_pair";
    good.monotone_count = true;
    good.t0_detected = 0.37;

    Verdict ring;
    ring.scenario = "marriage_ring";
    ring.monotone_count = true;
    ring.notes.push_back({1, "measure-increase", "section grew"});

    Verdict broken;
    broken.scenario = "csf_pair";
    broken.monotone_count = false;

    const std::string err = R"({"schema":"1","error":{"code":"cfl-violation","message":"x"}})";

    auto rep = emit_report({{"a_pair", verdict_to_json(good)},
                            {"b_ring", verdict_to_json(ring)},
                            {"c_broken", verdict_to_json(broken)},
                            {"d_error", err}});
    CHECK(rep.pass == 1);
    CHECK(rep.expected_fail == 1);
    CHECK(rep.unexpected_fail == 2);
    CHECK(rep.table.find("totals: 1 pass, 1 expected-fail, 2 unexpected-fail") !=
          std::string::npos);
    CHECK(rep.json.find("\"unexpected-fail\"") != std::string::npos);

    Verdict alien;
    alien.scenario = "not_in_the_table";
    auto rep2 = emit_report({{"x", verdict_to_json(alien)}});
    CHECK(rep2.unexpected_fail == 1);

    CHECK_THROWS_WITH_AS(emit_report({}), doctest::Contains("invalid-params"), SimError);
}

TEST_CASE("missing t0 or absent note tags turn into unexpected-fail") {
    Verdict stuck;  // never separates: t0 "none" but the table wants "some"
    stuck.scenario = "csf_pair";
    stuck.monotone_count = true;
    auto rep = emit_report({{"stuck", verdict_to_json(stuck)}});
    CHECK(rep.unexpected_fail == 1);

    Verdict quiet;  // marriage_ring without its measure-increase note
    quiet.scenario = "marriage_ring";
    quiet.monotone_count = true;
    auto rep2 = emit_report({{"quiet", verdict_to_json(quiet)}});
    CHECK(rep2.unexpected_fail == 1);
}

TEST_CASE("custom expectations override the bundled table") {
    Verdict v;
    v.scenario = "csf_pair";
    v.monotone_count = false;
    const std::string tab = R"({
      "schema": "1",
      "buckets": {
        "csf_pair": { "label": "inverted", "fields": { "monotone_count": false } }
      }
    })";
    auto rep = emit_report({{"v", verdict_to_json(v)}}, tab);
    CHECK(rep.pass == 1);
    CHECK(rep.unexpected_fail == 0);
}

TEST_CASE("run_scenario writes the artifact set deterministically") {
    auto out1 = fresh_dir("det1");
    auto out2 = fresh_dir("det2");
    auto cfg = parse_config(R"({
        "scenario": "csf_pair", "resolution": 0.06, "horizon": 0.08,
        "sample_dt": 0.02, "params": {"radius_a": 0.6, "radius_b": 0.6,
        "separation": 0.5}})");
    cfg.output_dir = out1.string();
    auto r1 = run_scenario(cfg);
    cfg.output_dir = out2.string();
    auto r2 = run_scenario(cfg);

    for (const char* f : {"samples.csv", "verdict.json", "config.json"})
        CHECK(fs::exists(out1 / f));
    CHECK(slurp(out1 / "samples.csv") == slurp(out2 / "samples.csv"));
    CHECK(slurp(out1 / "verdict.json") == slurp(out2 / "verdict.json"));
    CHECK(r1.verdict.monotone_count == r2.verdict.monotone_count);
    CHECK(!r1.artifacts.empty());

    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("custom scenario output depends on the seed") {
    auto base = parse_config(R"({
        "scenario": "custom", "horizon": 0.02, "sample_dt": 0.005,
        "resolution": 0.05})");
    auto outA = fresh_dir("seedA");
    auto outB = fresh_dir("seedB");
    auto a = base;
    a.output_dir = outA.string();
    a.seed = 1;
    run_scenario(a);
    auto b = base;
    b.output_dir = outB.string();
    b.seed = 2;
    run_scenario(b);
    CHECK(slurp(outA / "samples.csv") != slurp(outB / "samples.csv"));
    fs::remove_all(outA);
    fs::remove_all(outB);
}

TEST_CASE("suite runs configs in sorted order and captures errors") {
    auto cfgs = fresh_dir("suitecfg");
    auto out = fresh_dir("suiteout");
    {
        std::ofstream(cfgs / "b_ok.json")
            << R"({"scenario": "csf_pair", "resolution": 0.06, "horizon": 0.08,
                  "sample_dt": 0.02, "params": {"radius_a": 0.6, "radius_b": 0.6,
                  "separation": 0.5}})";
        std::ofstream(cfgs / "a_bad.json") << R"({"scenario": "nope"})";
    }
    auto entries = run_suite(cfgs.string(), out.string(), 2);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].name == "a_bad");
    CHECK(entries[0].error);
    CHECK(entries[0].error_code == "config-invalid");
    CHECK(entries[1].name == "b_ok");
    CHECK(!entries[1].error);
    CHECK(fs::exists(out / "a_bad" / "error.json"));
    CHECK(fs::exists(out / "b_ok" / "verdict.json"));
    CHECK(slurp(out / "a_bad" / "error.json").find("\"code\": \"config-invalid\"") !=
          std::string::npos);
    fs::remove_all(cfgs);
    fs::remove_all(out);
}
