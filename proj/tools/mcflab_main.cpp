// mcflab command line: run one scenario, run a suite directory, or bucket a
// results directory against the expectations table.
//
// Output root precedence: LAB_OUT env > --out > config output_dir. `run`
// writes artifacts directly into the resolved directory; `suite` treats it as
// a root holding one subdirectory per config. Exit codes: 0 completed (verdict
// contents are data, not errors), 1 report found unexpected failures, 2
// configuration or simulation error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcflab/scenario.hpp"

namespace fs = std::filesystem;
using mcflab::SimError;

namespace {

std::string read_text_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw SimError("io-error", "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_doc(const std::string& code, const std::string& message) {
    nlohmann::ordered_json j;
    j["schema"] = "1";
    j["error"] = nlohmann::ordered_json{{"code", code}, {"message", message}};
    return j.dump(2) + "\n";
}

void try_write(const fs::path& p, const std::string& text) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream os(p, std::ios::binary);
    os << text;
}

int cmd_run(const std::string& cfg_path, const std::string& out_flag, bool frames) {
    std::string resolved_out;
    try {
        auto cfg = mcflab::parse_config(read_text_file(cfg_path));
        if (!out_flag.empty()) cfg.output_dir = out_flag;
        if (const char* env = std::getenv("LAB_OUT"); env && *env) cfg.output_dir = env;
        if (frames) cfg.emit_frames = true;
        resolved_out = cfg.output_dir;
        auto rr = mcflab::run_scenario(cfg);
        std::cout << mcflab::verdict_to_json(rr.verdict);
        return 0;
    } catch (const std::exception& e) {
        const auto* se = dynamic_cast<const SimError*>(&e);
        const std::string doc = error_doc(se ? se->code() : "internal", e.what());
        std::cerr << doc;
        if (!resolved_out.empty()) try_write(fs::path(resolved_out) / "error.json", doc);
        return 2;
    }
}

int cmd_suite(const std::string& config_dir, std::string out_root, int workers) {
    if (const char* env = std::getenv("LAB_OUT"); env && *env) out_root = env;
    try {
        auto entries = mcflab::run_suite(config_dir, out_root, workers);
        bool any_error = false;
        for (const auto& ent : entries) {
            any_error = any_error || ent.error;
            std::cout << ent.name << ": "
                      << (ent.error ? "error (" + ent.error_code + ")" : "completed")
                      << '\n';
        }
        std::cout << entries.size() << " runs under " << out_root << '\n';
        return any_error ? 2 : 0;
    } catch (const std::exception& e) {
        const auto* se = dynamic_cast<const SimError*>(&e);
        std::cerr << error_doc(se ? se->code() : "internal", e.what());
        return 2;
    }
}

int cmd_report(const std::string& results_dir, const std::string& expectations_path) {
    try {
        std::string expectations;
        if (!expectations_path.empty()) expectations = read_text_file(expectations_path);
        std::vector<std::pair<std::string, std::string>> named;
        std::vector<fs::path> subdirs;
        for (const auto& e : fs::directory_iterator(results_dir))
            if (e.is_directory()) subdirs.push_back(e.path());
        std::sort(subdirs.begin(), subdirs.end());
        for (const auto& d : subdirs) {
            for (const char* leaf : {"verdict.json", "error.json"}) {
                if (fs::exists(d / leaf)) {
                    named.push_back({d.filename().string(), read_text_file(d / leaf)});
                    break;
                }
            }
        }
        if (named.empty())
            throw SimError("invalid-params",
                           "no verdict.json/error.json under " + results_dir);
        auto rep = mcflab::emit_report(named, expectations);
        try_write(fs::path(results_dir) / "report.json", rep.json);
        try_write(fs::path(results_dir) / "report.txt", rep.table);
        std::cout << rep.table;
        return rep.unexpected_fail > 0 ? 1 : 0;
    } catch (const std::exception& e) {
        const auto* se = dynamic_cast<const SimError*>(&e);
        std::cerr << error_doc(se ? se->code() : "internal", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean curvature flow intersection laboratory"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir, config_dir, results_dir, expectations_path;
    bool frames = false;
    int workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

    auto* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("config", cfg_path, "scenario config JSON")->required();
    run->add_option("--out", out_dir, "output directory (beats config output_dir)");
    run->add_flag("--frames", frames, "emit SVG frames");
    run->add_option("--workers", workers, "accepted for interface parity; a run is serial");

    auto* suite = app.add_subcommand("suite", "run every *.json config in a directory");
    suite->add_option("config_dir", config_dir, "directory of scenario configs")->required();
    suite->add_option("--out", out_dir, "output root (one subdirectory per config)");
    suite->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "bucket results against expectations");
    report->add_option("results_dir", results_dir, "directory of run outputs")->required();
    report->add_option("--expectations", expectations_path, "expectations table JSON");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(cfg_path, out_dir, frames);
    if (suite->parsed())
        return cmd_suite(config_dir, out_dir.empty() ? "lab_out" : out_dir, workers);
    return cmd_report(results_dir, expectations_path);
}
