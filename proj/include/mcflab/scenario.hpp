#pragma once

// Scenario runner: JSON configs in, simulation pipelines dispatched, CSV/JSON/
// SVG artifacts out, plus the suite driver and the expectations report.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcflab/csf.hpp"
#include "mcflab/geometry.hpp"

namespace mcflab {

enum class ScenarioKind {
    CsfPair,
    CsfSelf,
    GraphicalPair,
    MarriageRing,
    Dumbbell,
    ConeFattening,
    Localizability,
    Custom,
};

std::string to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_from_string(const std::string& s);

// `resolution` is the target edge length h for curve scenarios and the grid
// cell count per side for grid scenarios (see the per-scenario table in the
// README / scenario.cpp). 0 means "use the scenario default". `variant`
// selects a named flavor where a scenario has several (csf_self curve shape,
// localizability split); `params` carries numeric scenario-specific knobs.
struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::CsfPair;
    double resolution = 0.0;
    double horizon = 0.0;
    double sample_dt = 0.0;
    std::uint64_t seed = 1;
    std::string output_dir = "lab_out";
    bool emit_frames = false;
    std::string variant;
    std::map<std::string, double> params;

    bool operator==(const ScenarioConfig&) const = default;
};

// Throws SimError("config-parse") on malformed JSON (message carries the
// parser's line/column) and SimError("config-invalid") on unknown keys,
// unknown scenario/variant names, or constraint violations ("horizon must be
// positive", sample_dt in (0, horizon/4], resolution bounds).
ScenarioConfig parse_config(const std::string& text);
std::string serialize_config(const ScenarioConfig& c);  // parse-exact round trip

struct Verdict {
    std::string scenario;  // scenario name, plus ":variant" when one is set
    std::optional<bool> monotone_dim;    // nullopt = n/a
    std::optional<bool> monotone_count;  // nullopt = n/a
    std::optional<double> t0_detected;   // nullopt = none
    std::optional<bool> fattening;       // nullopt = n/a
    std::vector<MonitorNote> notes;      // flagged samples and run annotations
    std::vector<std::pair<std::string, double>> tolerances;  // every threshold used
};

std::string verdict_to_json(const Verdict& v);

struct RunResult {
    Verdict verdict;
    std::vector<std::string> artifacts;  // paths written, relative to output_dir
};

// Deterministic given the config (seed included). Writes samples.csv,
// verdict.json, scenario-specific series CSVs, and frames/*.svg when
// emit_frames is set. Simulation failures propagate as SimError; the caller
// (CLI) turns them into structured error JSON and a nonzero exit.
RunResult run_scenario(const ScenarioConfig& config);

struct SuiteEntry {
    std::string name;          // config file stem
    std::string verdict_json;  // verdict or structured error document
    bool error = false;
    std::string error_code;
};

// Runs every *.json config under config_dir (sorted), up to `workers` in
// parallel, each writing artifacts to out_root/<stem>/. Deterministic output
// regardless of scheduling; entries come back in sorted-name order.
std::vector<SuiteEntry> run_suite(const std::string& config_dir, const std::string& out_root,
                                  int workers);

struct Report {
    std::string json;   // {"schema":"1","counts":{...},"buckets":{...}}
    std::string table;  // fixed-width human-readable summary
    int pass = 0, expected_fail = 0, unexpected_fail = 0;
};

// Buckets each named verdict against the expectations table (JSON text; pass
// empty to use the bundled default). A verdict matching an expectation marked
// expect_violation lands in expected-fail; matching an ordinary expectation in
// pass; anything else (mismatch, error document, unlisted scenario) in
// unexpected-fail. Throws SimError("invalid-params") on an empty verdict list.
Report emit_report(const std::vector<std::pair<std::string, std::string>>& named_verdicts,
                   const std::string& expectations_json = {});

// Bundled expectations table (same content as data/expectations.json).
const std::string& default_expectations_json();

}  // namespace mcflab
