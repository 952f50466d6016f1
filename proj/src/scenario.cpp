#include "mcflab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mcflab/axisym.hpp"
#include "mcflab/graphical.hpp"
#include "mcflab/levelset.hpp"
#include "mcflab/svg.hpp"

namespace mcflab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Names, defaults, config parsing.
// ---------------------------------------------------------------------------

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::CsfPair: return "csf_pair";
        case ScenarioKind::CsfSelf: return "csf_self";
        case ScenarioKind::GraphicalPair: return "graphical_pair";
        case ScenarioKind::MarriageRing: return "marriage_ring";
        case ScenarioKind::Dumbbell: return "dumbbell";
        case ScenarioKind::ConeFattening: return "cone_fattening";
        case ScenarioKind::Localizability: return "localizability";
        case ScenarioKind::Custom: return "custom";
    }
    return "?";
}

std::optional<ScenarioKind> scenario_from_string(const std::string& s) {
    for (ScenarioKind k :
         {ScenarioKind::CsfPair, ScenarioKind::CsfSelf, ScenarioKind::GraphicalPair,
          ScenarioKind::MarriageRing, ScenarioKind::Dumbbell, ScenarioKind::ConeFattening,
          ScenarioKind::Localizability, ScenarioKind::Custom})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

namespace {

struct ScenarioDefaults {
    double resolution;      // target edge length h (curves) or cells per side (grids)
    double res_lo, res_hi;  // documented bounds
    double horizon;
    double sample_dt;
    std::vector<std::string> variants;  // first entry is the default; empty = none
    std::vector<std::pair<std::string, double>> params;
};

const ScenarioDefaults& defaults_for(ScenarioKind k) {
    static const ScenarioDefaults tbl[] = {
        /* csf_pair */
        {0.02, 0.002, 0.2, 0.45, 0.01, {},
         {{"radius_a", 1.0}, {"radius_b", 1.0}, {"separation", 1.0}}},
        /* csf_self */
        {0.02, 0.002, 0.2, 0.12, 0.005, {"figure_eight", "three_crossing"}, {}},
        /* graphical_pair */
        {65.0, 17.0, 513.0, 0.02, 0.002, {}, {{"amp", 0.25}, {"tilt", 0.15}}},
        /* marriage_ring */
        {0.004, 0.001, 0.05, 0.01, 0.0002, {}, {{"n", 2.0}}},
        /* dumbbell */
        {0.008, 0.002, 0.05, 0.0007, 0.00005, {},
         {{"L", 0.5}, {"eps", 0.04}, {"delta", 0.8}}},
        /* cone_fattening */
        {128.0, 32.0, 512.0, 0.1, 0.01, {},
         {{"aperture_deg", 75.0}, {"plane_offset", 0.0}}},
        /* localizability */
        {128.0, 32.0, 512.0, 0.01, 0.002, {"circles", "dumbbell", "cone"},
         {{"aperture_deg", 75.0}, {"mask_radius", 0.5}}},
        /* custom */
        {0.02, 0.002, 0.2, 0.3, 0.01, {},
         {{"base_radius", 0.8}, {"wobble", 0.06}, {"separation", 0.7}}},
    };
    return tbl[static_cast<int>(k)];
}

double need_number(const ojson& j, const std::string& key) {
    if (!j.at(key).is_number())
        throw SimError("config-invalid", key + " must be a number");
    return j.at(key).get<double>();
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SimError("config-parse", e.what());
    }
    if (!j.is_object())
        throw SimError("config-invalid", "top level must be a JSON object");
    static const std::set<std::string> known{"scenario",   "resolution", "horizon",
                                             "sample_dt",  "seed",       "output_dir",
                                             "emit_frames", "variant",   "params"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw SimError("config-invalid", "unknown key \"" + item.key() + "\"");
    if (!j.contains("scenario"))
        throw SimError("config-invalid", "missing required key \"scenario\"");
    if (!j.at("scenario").is_string())
        throw SimError("config-invalid", "scenario must be a string");

    ScenarioConfig c;
    const std::string sname = j.at("scenario").get<std::string>();
    auto kind = scenario_from_string(sname);
    if (!kind) throw SimError("config-invalid", "unknown scenario \"" + sname + "\"");
    c.scenario = *kind;
    const ScenarioDefaults& d = defaults_for(c.scenario);

    if (j.contains("variant")) {
        if (!j.at("variant").is_string())
            throw SimError("config-invalid", "variant must be a string");
        c.variant = j.at("variant").get<std::string>();
    }
    if (d.variants.empty()) {
        if (!c.variant.empty())
            throw SimError("config-invalid",
                           "variant not supported for scenario " + sname);
    } else if (c.variant.empty()) {
        c.variant = d.variants.front();
    } else if (std::find(d.variants.begin(), d.variants.end(), c.variant) ==
               d.variants.end()) {
        throw SimError("config-invalid", "unknown variant \"" + c.variant + "\"");
    }

    c.resolution = j.contains("resolution") ? need_number(j, "resolution") : 0.0;
    if (c.resolution == 0.0) {
        c.resolution = d.resolution;
        // The compact dumbbell neck needs a finer grid than the other splits.
        if (c.scenario == ScenarioKind::Localizability && c.variant == "dumbbell")
            c.resolution = 192.0;
    }
    if (!(c.resolution >= d.res_lo) || !(c.resolution <= d.res_hi))
        throw SimError("config-invalid",
                       "resolution " + format_double(c.resolution) + " outside [" +
                           format_double(d.res_lo) + ", " + format_double(d.res_hi) +
                           "] for scenario " + sname);

    c.horizon = j.contains("horizon") ? need_number(j, "horizon") : d.horizon;
    if (!(c.horizon > 0.0)) throw SimError("config-invalid", "horizon must be positive");
    c.sample_dt = j.contains("sample_dt") ? need_number(j, "sample_dt") : d.sample_dt;
    if (!(c.sample_dt > 0.0) || c.sample_dt > c.horizon / 4.0 * (1.0 + 1e-12))
        throw SimError("config-invalid", "sample_dt must lie in (0, horizon/4]");

    if (j.contains("seed")) {
        const auto& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<long long>() < 0))
            throw SimError("config-invalid", "seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            throw SimError("config-invalid", "output_dir must be a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("emit_frames")) {
        if (!j.at("emit_frames").is_boolean())
            throw SimError("config-invalid", "emit_frames must be a boolean");
        c.emit_frames = j.at("emit_frames").get<bool>();
    }

    for (const auto& [k, v] : d.params) c.params[k] = v;
    if (j.contains("params")) {
        if (!j.at("params").is_object())
            throw SimError("config-invalid", "params must be an object");
        for (const auto& item : j.at("params").items()) {
            if (!c.params.count(item.key()))
                throw SimError("config-invalid", "unknown param \"" + item.key() +
                                                     "\" for scenario " + sname);
            if (!item.value().is_number())
                throw SimError("config-invalid",
                               "param " + item.key() + " must be a number");
            c.params[item.key()] = item.value().get<double>();
        }
    }

    // Cheap cross-field checks; deeper geometry checks live in the builders.
    if (c.scenario == ScenarioKind::MarriageRing) {
        const double n = c.params.at("n");
        if (n != std::floor(n) || n < 2.0 || n > 6.0)
            throw SimError("config-invalid", "params.n must be an integer in [2, 6]");
    }
    if (c.scenario == ScenarioKind::Dumbbell) {
        if (!(c.params.at("delta") > 0.0) || c.params.at("delta") > 1.0)
            throw SimError("config-invalid", "params.delta must lie in (0, 1]");
    }
    if (c.scenario == ScenarioKind::ConeFattening ||
        c.scenario == ScenarioKind::Localizability) {
        const double a = c.params.at("aperture_deg");
        if (!(a > 0.0) || !(a < 90.0))
            throw SimError("config-invalid",
                           "params.aperture_deg must lie in (0, 90)");
    }
    return c;
}

std::string serialize_config(const ScenarioConfig& c) {
    ojson j;
    j["scenario"] = to_string(c.scenario);
    j["resolution"] = c.resolution;
    j["horizon"] = c.horizon;
    j["sample_dt"] = c.sample_dt;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["emit_frames"] = c.emit_frames;
    if (!c.variant.empty()) j["variant"] = c.variant;
    if (!c.params.empty()) {
        ojson p;
        for (const auto& [k, v] : c.params) p[k] = v;
        j["params"] = p;
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Verdict serialization.
// ---------------------------------------------------------------------------

namespace {

ojson notes_to_json(const std::vector<MonitorNote>& notes) {
    ojson arr = ojson::array();
    for (const auto& n : notes)
        arr.push_back(ojson{{"sample", n.sample}, {"tag", n.tag}, {"detail", n.detail}});
    return arr;
}

}  // namespace

std::string verdict_to_json(const Verdict& v) {
    ojson j;
    j["schema"] = "1";
    j["scenario"] = v.scenario;
    auto tri = [](const std::optional<bool>& b) -> ojson {
        if (!b) return "n/a";
        return *b;
    };
    j["monotone_dim"] = tri(v.monotone_dim);
    j["monotone_count"] = tri(v.monotone_count);
    j["t0_detected"] = v.t0_detected ? ojson(*v.t0_detected) : ojson("none");
    j["fattening"] = tri(v.fattening);
    j["notes"] = notes_to_json(v.notes);
    ojson tol;
    for (const auto& [k, val] : v.tolerances) tol[k] = val;
    j["tolerances"] = tol;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Builders shared by the runners.
// ---------------------------------------------------------------------------

namespace {

Polyline make_circle_curve(Vec2 center, double r, double h) {
    int nv = std::max<int>(16, static_cast<int>(std::lround(2.0 * M_PI * r / h)));
    nv += nv % 2;
    Polyline p;
    p.closed = true;
    p.vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        const double a = 2.0 * M_PI * i / nv;
        p.vertices.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return p;
}

// Platform-independent uniform in [0, 1): standard mt19937_64 output scaled
// directly (std::uniform_real_distribution is not bit-stable across libraries).
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

Polyline random_blob(std::mt19937_64& rng, Vec2 center, double base_r, double wobble,
                     double h) {
    double a[4], ph[4];
    for (int k = 0; k < 4; ++k) {
        a[k] = wobble * uniform01(rng);
        ph[k] = 2.0 * M_PI * uniform01(rng);
    }
    const int nv0 = 1024;
    Polyline dense;
    dense.closed = true;
    for (int i = 0; i < nv0; ++i) {
        const double th = 2.0 * M_PI * i / nv0;
        double r = 1.0;
        for (int k = 0; k < 4; ++k) r += a[k] * std::cos((k + 2) * th + ph[k]);
        r *= base_r;
        dense.vertices.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
    }
    return resample(dense, h);
}

Polyline figure_eight_curve(double h) {
    const int nv0 = 4096;
    Polyline dense;
    dense.closed = true;
    for (int i = 0; i < nv0; ++i) {
        const double th = 2.0 * M_PI * i / nv0;
        dense.vertices.push_back({0.7 * std::sin(th), 0.7 * std::sin(th) * std::cos(th)});
    }
    return resample(dense, h);
}

Polyline three_crossing_curve(double h) {
    // Trefoil-knot shadow: exactly three transverse self-crossings.
    const int nv0 = 4096;
    Polyline dense;
    dense.closed = true;
    for (int i = 0; i < nv0; ++i) {
        const double th = 2.0 * M_PI * i / nv0;
        dense.vertices.push_back({0.25 * (std::sin(th) + 2.0 * std::sin(2.0 * th)),
                                  0.25 * (std::cos(th) - 2.0 * std::cos(2.0 * th))});
    }
    return resample(dense, h);
}

// ---------------------------------------------------------------------------
// Artifact plumbing.
// ---------------------------------------------------------------------------

struct ArtifactWriter {
    fs::path root;
    std::vector<std::string>* artifacts;

    void write(const std::string& rel, const std::string& content) const {
        const fs::path p = root / rel;
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        std::ofstream os(p, std::ios::binary);
        os << content;
        if (!os) throw SimError("io-error", "cannot write " + p.string());
        artifacts->push_back(rel);
    }
};

std::string samples_csv(const std::vector<IntersectionSample>& samples) {
    std::ostringstream os;
    os << "t,components,measure,dim,points_xy\n";
    for (const auto& s : samples) write_sample_csv_row(os, s);
    return os.str();
}

std::string frame_name(int i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "frames/frame_%05d.svg", i);
    return buf;
}

// Marker-only frames for scenarios whose series keep point clouds rather than
// curves.
void emit_cloud_frames(const ArtifactWriter& w, const std::vector<IntersectionSample>& ss) {
    for (size_t i = 0; i < ss.size(); ++i)
        w.write(frame_name(static_cast<int>(i)),
                render_svg_frame({}, ss[i].points.points, "t=" + format_double(ss[i].t)));
}

Verdict base_verdict(const ScenarioConfig& cfg) {
    Verdict v;
    v.scenario = to_string(cfg.scenario);
    if (!cfg.variant.empty()) v.scenario += ":" + cfg.variant;
    return v;
}

void note_flagged(Verdict& v, const std::vector<int>& flagged,
                  const std::vector<IntersectionSample>& ss, const std::string& tag,
                  const std::string& what) {
    for (int si : flagged) {
        const double t = (si >= 0 && si < static_cast<int>(ss.size())) ? ss[si].t : -1.0;
        v.notes.push_back({si, tag, what + " at t=" + format_double(t)});
    }
}

void common_tolerances(Verdict& v, double h, double sample_dt) {
    v.tolerances.push_back({"link_radius", 2.0 * h});
    v.tolerances.push_back({"dim_tol", 0.2});
    v.tolerances.push_back({"dim_scale_coarsest", 16.0 * h});
    v.tolerances.push_back({"count_forgiveness_samples", 1.0});
    v.tolerances.push_back({"sample_dt", sample_dt});
}

// ---------------------------------------------------------------------------
// Family runners.
// ---------------------------------------------------------------------------

Verdict run_csf_family(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    const double h = cfg.resolution;
    int fidx = 0;
    FrameSink sink;
    if (cfg.emit_frames)
        sink = [&](double t, const std::vector<Polyline>& curves,
                   const std::vector<Vec2>& markers) {
            w.write(frame_name(fidx++), render_svg_frame(curves, markers,
                                                         "t=" + format_double(t)));
        };

    MonitorSeries ms;
    if (cfg.scenario == ScenarioKind::CsfSelf) {
        Polyline c = cfg.variant == "three_crossing" ? three_crossing_curve(h)
                                                     : figure_eight_curve(h);
        ms = run_self_monitor(CsfState::from_curve(std::move(c), h), cfg.horizon,
                              cfg.sample_dt, sink);
    } else {
        Polyline a, b;
        if (cfg.scenario == ScenarioKind::Custom) {
            std::mt19937_64 rng(cfg.seed);
            const double br = cfg.params.at("base_radius");
            const double wob = cfg.params.at("wobble");
            const double sep = cfg.params.at("separation");
            a = random_blob(rng, {-sep / 2.0, 0.0}, br, wob, h);
            b = random_blob(rng, {+sep / 2.0, 0.0}, br, wob, h);
        } else {
            const double sep = cfg.params.at("separation");
            a = make_circle_curve({-sep / 2.0, 0.0}, cfg.params.at("radius_a"), h);
            b = make_circle_curve({+sep / 2.0, 0.0}, cfg.params.at("radius_b"), h);
        }
        ms = run_pair_monitor(CsfState::from_curve(std::move(a), h),
                              CsfState::from_curve(std::move(b), h), cfg.horizon,
                              cfg.sample_dt, sink);
    }

    Verdict v = base_verdict(cfg);
    v.monotone_count = ms.monotone_count;
    v.t0_detected = ms.t0_detected;
    const auto dv = evaluate_dim_series(ms.samples);
    v.monotone_dim = dv.monotone;
    v.notes = ms.notes;
    note_flagged(v, ms.flagged, ms.samples, "count-increase", "component count rose");
    note_flagged(v, dv.flagged, ms.samples, "dim-increase",
                 "dimension estimate rose above its running minimum");
    common_tolerances(v, h, cfg.sample_dt);
    w.write("samples.csv", samples_csv(ms.samples));
    return v;
}

Verdict run_graphical(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    const int N = static_cast<int>(std::lround(cfg.resolution));
    const double h = 1.0 / (N - 1);
    const double amp = cfg.params.at("amp"), tilt = cfg.params.at("tilt");
    GraphPair pair;
    pair.u = make_field(N, N, h, {0.0, 0.0});
    pair.v = make_field(N, N, h, {0.0, 0.0});
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const Vec2 p = pair.u.pos(i, j);
            const double base = amp * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
            pair.u.at(i, j) = base;
            pair.v.at(i, j) = base + tilt * (p.x + p.y - 1.0);
        }
    }
    auto series = evolve_pair_and_track_nodal(pair, cfg.horizon, cfg.sample_dt, 5);

    Verdict v = base_verdict(cfg);
    v.monotone_count = series.mon.monotone_count;
    v.t0_detected = series.mon.t0_detected;
    const auto dv = evaluate_dim_series(series.mon.samples);
    v.monotone_dim = dv.monotone;
    v.notes = series.mon.notes;
    note_flagged(v, series.mon.flagged, series.mon.samples, "count-increase",
                 "nodal component count rose");
    note_flagged(v, dv.flagged, series.mon.samples, "dim-increase",
                 "dimension estimate rose above its running minimum");
    common_tolerances(v, h, cfg.sample_dt);
    v.tolerances.push_back({"ellipticity_slack", 1e-9});
    v.tolerances.push_back({"lambda_seed_dt", cfg.sample_dt});

    w.write("samples.csv", samples_csv(series.mon.samples));
    std::ostringstream nodal;
    nodal << "t,measure_est,lambda_est,n_points\n";
    for (size_t i = 0; i < series.mon.samples.size(); ++i) {
        const auto& s = series.mon.samples[i];
        nodal << format_double(s.t) << ',' << format_double(s.measure_est) << ','
              << format_double(series.lambda[i]) << ',' << s.points.size() << '\n';
    }
    w.write("nodal.csv", nodal.str());
    if (series.hypothesis) {
        const auto& hr = *series.hypothesis;
        ojson j;
        j["schema"] = "1";
        j["ellipticity_ok"] = hr.ellipticity_ok;
        j["eig_min"] = hr.eig_min;
        j["eig_max"] = hr.eig_max;
        j["eig_bracket"] = ojson::array(
            {1.0 / (1.0 + hr.c_bound) - 1e-9, 1.0 + 1e-9});
        j["lipschitz_est"] = hr.lipschitz_est;
        j["b_sup"] = hr.b_sup;
        j["C_bound"] = hr.c_bound;
        w.write("hypothesis.json", j.dump(2) + "\n");
    }
    if (cfg.emit_frames) emit_cloud_frames(w, series.mon.samples);
    return v;
}

Verdict run_marriage_ring(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    const double h = cfg.resolution;
    const int n = static_cast<int>(cfg.params.at("n"));
    auto ring = marriage_ring_profile(n, h);
    auto series = ring_intersection_series(ring, cfg.horizon, cfg.sample_dt);

    MonitorSeries ms;
    ms.samples = series.clouds;
    evaluate_count_series(ms);

    Verdict v = base_verdict(cfg);
    v.monotone_count = ms.monotone_count;
    v.t0_detected = ms.t0_detected;
    const auto dv = evaluate_dim_series(series.clouds);
    v.monotone_dim = dv.monotone;
    v.notes = series.notes;
    for (const auto& nte : ms.notes) v.notes.push_back(nte);
    note_flagged(v, ms.flagged, series.clouds, "count-increase", "component count rose");
    note_flagged(v, dv.flagged, series.clouds, "dim-increase",
                 "dimension estimate rose above its running minimum");

    // The headline effect: the section measure grows on an initial interval.
    size_t k = 0;
    while (k + 1 < series.samples.size() &&
           series.samples[k + 1].measure > series.samples[k].measure)
        ++k;
    if (k >= 1) {
        const double rate = (series.samples[1].measure - series.samples[0].measure) /
                            (series.samples[1].t - series.samples[0].t);
        v.notes.push_back({0, "measure-increase",
                           "measure increased on [0," + format_double(series.samples[k].t) +
                               "] (initial rate " + format_double(rate) + ")"});
    }
    common_tolerances(v, h, cfg.sample_dt);

    std::ostringstream rcsv;
    rcsv << "t,r_min,r_max,measure\n";
    for (const auto& s : series.samples)
        rcsv << format_double(s.t) << ',' << format_double(s.r_min) << ','
             << format_double(s.r_max) << ',' << format_double(s.measure) << '\n';
    w.write("ring.csv", rcsv.str());
    w.write("samples.csv", samples_csv(series.clouds));
    if (cfg.emit_frames) emit_cloud_frames(w, series.clouds);
    return v;
}

Verdict run_dumbbell(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    const double h = cfg.resolution;
    const double L = cfg.params.at("L"), eps = cfg.params.at("eps");
    const double delta = cfg.params.at("delta");
    const double plane_z = std::sqrt(1.0 - delta / 2.0) * eps;
    auto db = dumbbell_profile(L, eps, h);
    auto series = dumbbell_component_series(db, L, plane_z, cfg.horizon, cfg.sample_dt);

    Verdict v = base_verdict(cfg);
    // Component growth through the pinch is the scenario's documented feature,
    // so count monotonicity is not a claim here (n/a).
    const auto dv = evaluate_dim_series(series.clouds);
    v.monotone_dim = dv.monotone;
    v.notes = series.notes;
    note_flagged(v, dv.flagged, series.clouds, "dim-increase",
                 "dimension estimate rose above its running minimum");
    if (series.transition_detected) {
        for (size_t i = 1; i < series.samples.size(); ++i) {
            if (series.samples[i].components > series.samples.front().components) {
                v.notes.push_back({static_cast<int>(i), "component-transition",
                                   "plane section split 1 -> " +
                                       std::to_string(series.samples[i].components) +
                                       " at t=" + format_double(series.samples[i].t)});
                break;
            }
        }
    }
    common_tolerances(v, h, cfg.sample_dt);
    v.tolerances.push_back({"containment_tol", 3.0 * h});

    std::ostringstream dcsv;
    dcsv << "t,components,measure,dim,min_sphere_clearance\n";
    for (const auto& s : series.samples) {
        dcsv << format_double(s.t) << ',' << s.components << ',' << format_double(s.measure)
             << ',';
        if (s.dim_est) dcsv << format_double(*s.dim_est);
        dcsv << ',' << format_double(s.min_sphere_clearance) << '\n';
    }
    w.write("dumbbell.csv", dcsv.str());
    w.write("samples.csv", samples_csv(series.clouds));
    if (cfg.emit_frames) emit_cloud_frames(w, series.clouds);
    return v;
}

Verdict run_cone(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    const int grid_n = static_cast<int>(std::lround(cfg.resolution));
    auto series = cone_intersection_scenario(cfg.params.at("aperture_deg"),
                                             cfg.params.at("plane_offset"), cfg.horizon,
                                             cfg.sample_dt, grid_n);
    std::vector<IntersectionSample> clouds;
    for (const auto& s : series.samples) clouds.push_back(s.cloud);
    MonitorSeries ms;
    ms.samples = clouds;
    evaluate_count_series(ms);

    Verdict v = base_verdict(cfg);
    v.monotone_count = ms.monotone_count;
    v.t0_detected = ms.t0_detected;
    v.monotone_dim = series.monotone_dim;
    v.fattening = series.fattening;
    v.notes = series.notes;
    for (const auto& nte : ms.notes) v.notes.push_back(nte);
    note_flagged(v, ms.flagged, clouds, "count-increase", "component count rose");
    note_flagged(v, series.dim_flagged, clouds, "dim-increase",
                 "dimension estimate rose above its running minimum");
    common_tolerances(v, series.h, cfg.sample_dt);
    v.tolerances.push_back({"fat_threshold", 10.0 * series.h * series.h});
    v.tolerances.push_back({"fat_streak_samples", 2.0});
    v.tolerances.push_back({"thin_tol", 3.0 * series.h});
    v.tolerances.push_back({"collapse_radius", 2.0 * series.h});

    std::ostringstream fcsv;
    fcsv << "t,fat_volume,discrepancy,fattening\n";
    for (const auto& s : series.samples)
        fcsv << format_double(s.t) << ',' << format_double(s.fat_volume) << ','
             << format_double(s.discrepancy) << ','
             << (s.fat_volume > 10.0 * series.h * series.h ? 1 : 0) << '\n';
    w.write("fattening.csv", fcsv.str());
    w.write("samples.csv", samples_csv(clouds));
    if (cfg.emit_frames) emit_cloud_frames(w, clouds);
    return v;
}

// Localizability initial states per variant.
LevelSetState localizability_state(const ScenarioConfig& cfg, MaskSpec& K) {
    const int grid_n = static_cast<int>(std::lround(cfg.resolution)) & ~1;
    const int nx = grid_n + 1;

    if (cfg.variant == "cone") {
        const double m = 1.0 / std::tan(cfg.params.at("aperture_deg") * M_PI / 180.0);
        const double s = 1.0 / std::sqrt(1.0 + m * m);
        LevelSetState st;
        st.mode = LsMode::Axisym;
        st.n = 2;
        st.axis = Axis::Y;
        st.phi = make_field(nx, nx, 2.0 / grid_n, {-1.0, -1.0});
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i) {
                const Vec2 p = st.phi.pos(i, j);
                st.phi.at(i, j) = (m * std::abs(p.x) - std::abs(p.y)) * s;
            }
        K.is_disk = true;
        K.center = {0.0, 0.0};
        K.radius = cfg.params.at("mask_radius");
        return st;
    }

    const double h = 2.2 / grid_n;
    K.is_disk = false;
    K.normal = {1.0, 0.0};
    K.offset = 0.0;

    if (cfg.variant == "circles") {
        std::vector<Polyline> cs{make_circle_curve({-0.55, 0.0}, 0.3, h),
                                 make_circle_curve({+0.55, 0.0}, 0.3, h)};
        LevelSetState st;
        st.mode = LsMode::Planar;
        st.n = 1;
        st.phi = rasterize_signed_distance(cs, nx, nx, h, {-1.1, -1.1});
        reinitialize(st);
        return st;
    }

    // variant == "dumbbell": rasterize the compact meridian outline and evolve
    // past the neck pinch; the split plane through the neck must meet the
    // post-pinch zero set nowhere.
    LevelSetState st;
    st.mode = LsMode::Axisym;
    st.n = 2;
    st.axis = Axis::X;
    auto outline = compact_dumbbell_outline(0.35, 0.55, 0.08, h / 2.0);
    st.phi = rasterize_signed_distance({outline}, nx, nx, h, {-1.1, -1.1});
    reinitialize(st);
    const double t_max = 0.012;
    int split_streak = 0;
    while (st.t < t_max) {
        for (int k = 0; k < 10 && st.t < t_max; ++k) evolve_levelset(st, levelset_dt(st));
        auto zs = zero_set(st);
        if (zs.empty()) throw SimError("invalid-params", "dumbbell vanished before pinch");
        // Split test: the two halves of the zero set must clear the plane by 3h.
        double left = 1e300, right = 1e300;
        for (const auto& c : zs)
            for (const auto& p : c.vertices)
                (p.x < 0.0 ? left : right) = std::min(p.x < 0.0 ? left : right,
                                                      std::abs(p.x));
        if (left < 1e300 && right < 1e300 && left + right > 3.0 * h) {
            if (++split_streak >= 2) break;
        } else {
            split_streak = 0;
        }
    }
    if (split_streak < 2)
        throw SimError("invalid-params", "dumbbell neck failed to pinch before t=0.012");
    reinitialize(st);
    return st;
}

Verdict run_localizability(const ScenarioConfig& cfg, const ArtifactWriter& w) {
    MaskSpec K;
    LevelSetState at_t0 = localizability_state(cfg, K);
    const double h = at_t0.phi.h;
    auto res = localizability_check(at_t0, K, cfg.horizon, cfg.sample_dt);

    Verdict v = base_verdict(cfg);
    v.notes = res.notes;
    if (res.pass)
        v.notes.push_back({-1, "localizability-pass",
                           "piece union tracks the whole flow and pieces stay disjoint"});
    v.tolerances.push_back({"gap_tol", 2.0 * h});
    v.tolerances.push_back({"merge_radius", 2.0 * h});
    v.tolerances.push_back({"sample_dt", cfg.sample_dt});

    std::ostringstream lcsv;
    lcsv << "t,union_gap,piece_gap\n";
    for (const auto& s : res.samples)
        lcsv << format_double(s.t) << ',' << format_double(s.union_gap) << ','
             << format_double(s.piece_gap) << '\n';
    w.write("localizability.csv", lcsv.str());
    return v;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    RunResult rr;
    ArtifactWriter w{fs::path(config.output_dir), &rr.artifacts};
    std::error_code ec;
    fs::create_directories(w.root, ec);

    switch (config.scenario) {
        case ScenarioKind::CsfPair:
        case ScenarioKind::CsfSelf:
        case ScenarioKind::Custom:
            rr.verdict = run_csf_family(config, w);
            break;
        case ScenarioKind::GraphicalPair:
            rr.verdict = run_graphical(config, w);
            break;
        case ScenarioKind::MarriageRing:
            rr.verdict = run_marriage_ring(config, w);
            break;
        case ScenarioKind::Dumbbell:
            rr.verdict = run_dumbbell(config, w);
            break;
        case ScenarioKind::ConeFattening:
            rr.verdict = run_cone(config, w);
            break;
        case ScenarioKind::Localizability:
            rr.verdict = run_localizability(config, w);
            break;
    }
    w.write("verdict.json", verdict_to_json(rr.verdict));
    w.write("config.json", serialize_config(config));
    return rr;
}

std::vector<SuiteEntry> run_suite(const std::string& config_dir, const std::string& out_root,
                                  int workers) {
    std::vector<fs::path> cfgs;
    for (const auto& e : fs::directory_iterator(config_dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            cfgs.push_back(e.path());
    std::sort(cfgs.begin(), cfgs.end());
    if (cfgs.empty())
        throw SimError("invalid-params", "no *.json configs in " + config_dir);

    std::vector<SuiteEntry> entries(cfgs.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i; (i = next.fetch_add(1)) < cfgs.size();) {
            SuiteEntry& ent = entries[i];
            ent.name = cfgs[i].stem().string();
            const std::string out_dir = (fs::path(out_root) / ent.name).string();
            try {
                std::ifstream in(cfgs[i]);
                std::stringstream ss;
                ss << in.rdbuf();
                auto cfg = parse_config(ss.str());
                cfg.output_dir = out_dir;
                auto rr = run_scenario(cfg);
                ent.verdict_json = verdict_to_json(rr.verdict);
            } catch (const std::exception& e) {
                ent.error = true;
                const auto* se = dynamic_cast<const SimError*>(&e);
                ent.error_code = se ? se->code() : "internal";
                ojson j;
                j["schema"] = "1";
                j["error"] = ojson{{"code", ent.error_code}, {"message", e.what()}};
                ent.verdict_json = j.dump(2) + "\n";
                std::error_code ec;
                fs::create_directories(out_dir, ec);
                std::ofstream os(fs::path(out_dir) / "error.json", std::ios::binary);
                os << ent.verdict_json;
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(cfgs.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return entries;
}

}  // namespace mcflab
