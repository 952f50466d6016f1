#include "mcflab/csf.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

CsfState CsfState::from_curve(Polyline c, double h_target) {
    if (!polyline_valid(c)) throw SimError("invalid-curve", "degenerate polyline");
    if (h_target <= 0.0) throw SimError("invalid-curve", "h_target must be positive");
    CsfState s;
    s.curve = std::move(c);
    s.h_target = h_target;
    return s;
}

double stable_dt(const CsfState& state) {
    const double hmin = min_edge_length(state.curve);
    return 0.9 * 0.25 * hmin * hmin;
}

namespace {

// Liveness rules for curves at the resolution floor.
bool should_retire(const Polyline& c, double h_target) {
    if (polyline_length(c) < 10.0 * h_target) return true;
    if (c.closed) {
        const int tn = turning_number(c);
        if (std::abs(tn) == 1) {
            const double floor_area = 10.0 * h_target * 10.0 * h_target;
            if (std::abs(signed_area(c)) < floor_area) return true;
        }
    }
    const auto k = curvature(c);
    double kmax = 0.0;
    for (double v : k) kmax = std::max(kmax, std::abs(v));
    return kmax > 1.0 / h_target;
}

}  // namespace

void step_csf(CsfState& state, double dt) {
    if (!state.alive) return;
    Polyline& c = state.curve;
    const double hmin = min_edge_length(c);
    if (dt > 0.25 * hmin * hmin * (1.0 + 1e-12))
        throw SimError("cfl-violation", "dt=" + format_double(dt) +
                                            " exceeds 0.25*h_min^2=" +
                                            format_double(0.25 * hmin * hmin));

    const auto k = curvature(c);
    const auto tg = tangents(c);
    const size_t n = c.vertices.size();
    std::vector<Vec2> next(n);
    for (size_t i = 0; i < n; ++i) {
        const bool pinned = !c.closed && (i == 0 || i + 1 == n);
        if (pinned) {
            next[i] = c.vertices[i];
            continue;
        }
        const Vec2 nu{-tg[i].y, tg[i].x};
        next[i] = c.vertices[i] + nu * (k[i] * dt);
    }
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(next[i].x) || !std::isfinite(next[i].y))
            throw SimError("nan-field", "non-finite vertex after step at t=" +
                                            format_double(state.t));
    }
    c.vertices = std::move(next);
    state.t += dt;

    if (should_retire(c, state.h_target)) {
        state.alive = false;
        return;
    }
    if (max_edge_length(c) > 10.0 * min_edge_length(c)) {
        c = resample(c, state.h_target);
    }
}

std::vector<double> monitor_dim_scales(double h) { return dyadic_scales(16.0 * h, 4); }

IntersectionSample make_planar_sample(double t, std::vector<Vec2> pts, double h,
                                      int ambient_n) {
    IntersectionSample s;
    s.t = t;
    PointCloud cloud;
    cloud.points = std::move(pts);
    cloud.ambient_n = ambient_n;
    cloud.kind = CloudKind::Planar;
    s.component_count = count_components(cloud.points, 2.0 * h);
    s.measure_est = measure_estimate(cloud, 2.0 * h);
    if (!cloud.points.empty()) s.dim_est = box_dimension(cloud, monitor_dim_scales(h));
    s.points = std::move(cloud);
    return s;
}

void evaluate_count_series(MonitorSeries& series) {
    const auto& ss = series.samples;
    series.monotone_count = true;
    series.flagged.clear();
    for (size_t i = 1; i < ss.size(); ++i) {
        if (ss[i].component_count <= ss[i - 1].component_count) continue;
        const bool last = (i + 1 == ss.size());
        const bool recovered = !last && ss[i + 1].component_count <= ss[i - 1].component_count;
        if (recovered || last) {
            series.notes.push_back({static_cast<int>(i), "transient-increase",
                                    "count rose at t=" + format_double(ss[i].t) +
                                        " for a single sample"});
        } else {
            series.monotone_count = false;
            series.flagged.push_back(static_cast<int>(i));
        }
    }
    series.t0_detected.reset();
    bool seen_nonempty = false;
    bool all_empty = true;
    for (size_t i = 0; i < ss.size(); ++i) {
        const bool empty = ss[i].points.empty();
        if (!empty) {
            all_empty = false;
            seen_nonempty = true;
        } else if (seen_nonempty && !series.t0_detected) {
            series.t0_detected = ss[i].t;
        }
    }
    if (all_empty && !ss.empty()) series.t0_detected = 0.0;
}

namespace {

// Shared-clock evolution of one or two curves with exact landing on sample
// times. `collect` builds the intersection cloud of the current state.
MonitorSeries run_monitor(std::vector<CsfState> states, double T, double sample_dt,
                          const FrameSink& frames,
                          const std::function<std::vector<Vec2>(const std::vector<CsfState>&)>& collect) {
    if (T <= 0.0 || sample_dt <= 0.0)
        throw SimError("invalid-curve", "monitor horizon and sample_dt must be positive");
    double h = 0.0;
    for (auto& s : states) h = (h == 0.0) ? mean_edge_length(s.curve)
                                          : std::min(h, mean_edge_length(s.curve));

    MonitorSeries series;
    const int nsamples = static_cast<int>(std::floor(T / sample_dt + 1e-9)) + 1;
    double t = 0.0;
    for (int si = 0; si < nsamples; ++si) {
        const double target = std::min(si * sample_dt, T);
        while (t < target - 1e-13) {
            double dt = target - t;
            for (auto& s : states)
                if (s.alive) dt = std::min(dt, stable_dt(s));
            for (auto& s : states) step_csf(s, dt);
            t += dt;
            bool any_alive = false;
            for (auto& s : states) any_alive = any_alive || s.alive;
            if (!any_alive) break;
        }
        // Dead curves ended exactly where they died; the sample time is the
        // monitor clock, which may have stopped short of the target.
        const double sample_t = std::max(t, target);
        auto sample = make_planar_sample(sample_t, collect(states), h, 1);
        if (!sample_invariants_ok(sample))
            throw SimError("nan-field", "inconsistent intersection sample");
        if (frames) {
            std::vector<Polyline> cs;
            for (auto& s : states)
                if (s.alive) cs.push_back(s.curve);
            frames(sample_t, cs, sample.points.points);
        }
        series.samples.push_back(std::move(sample));
        bool any_alive = false;
        for (auto& s : states) any_alive = any_alive || s.alive;
        if (!any_alive && si + 1 < nsamples) {
            series.notes.push_back({si, "all-curves-retired",
                                    "evolution ended at t=" + format_double(t)});
            break;
        }
    }
    evaluate_count_series(series);
    return series;
}

}  // namespace

MonitorSeries run_pair_monitor(const CsfState& a0, const CsfState& b0, double T,
                               double sample_dt, const FrameSink& frames) {
    if (a0.curve.vertices == b0.curve.vertices && a0.curve.closed == b0.curve.closed)
        throw SimError("identical-inputs", "pair monitor requires distinct curves");
    return run_monitor({a0, b0}, T, sample_dt, frames,
                       [](const std::vector<CsfState>& st) -> std::vector<Vec2> {
                           if (!st[0].alive || !st[1].alive) return {};
                           return polyline_intersections(st[0].curve, st[1].curve);
                       });
}

MonitorSeries run_self_monitor(const CsfState& c0, double T, double sample_dt,
                               const FrameSink& frames) {
    return run_monitor({c0}, T, sample_dt, frames,
                       [](const std::vector<CsfState>& st) -> std::vector<Vec2> {
                           if (!st[0].alive) return {};
                           return self_intersections(st[0].curve);
                       });
}

}  // namespace mcflab
