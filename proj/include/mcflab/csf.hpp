#pragma once

// Curve shortening flow (mean curvature flow of plane curves) plus the
// intersection monitors that drive the pair/self scenarios.

#include <functional>
#include <optional>
#include <string>

#include "mcflab/geometry.hpp"

namespace mcflab {

struct CsfState {
    Polyline curve;
    double t = 0.0;
    bool alive = true;
    double h_target = 0.0;  // resampling scale; also feeds the liveness rules

    static CsfState from_curve(Polyline c, double h_target);
};

// One explicit Euler step: each vertex moves by kappa*nu*dt (nu = left normal
// of the tangent, i.e. inward for CCW curves; the product is orientation
// independent). Open curves keep both endpoints pinned. Enforces the CFL bound
// dt <= 0.25*h_min^2 (SimError("cfl-violation")), resamples when the edge
// ratio exceeds 10, and retires the curve when it becomes unresolvable:
// embedded loops (|turning| == 1) die by the enclosed-area rule
// |area| < (10*h_target)^2; immersed curves by max|kappa| > 1/h_target or
// total length < 10*h_target.
void step_csf(CsfState& state, double dt);

// Largest stable step for the current curve (0.9 safety under the CFL bound).
double stable_dt(const CsfState& state);

struct MonitorNote {
    int sample = -1;
    std::string tag;
    std::string detail;
};

struct MonitorSeries {
    std::vector<IntersectionSample> samples;
    bool monotone_count = true;
    std::optional<double> t0_detected;  // none = never separated
    std::vector<MonitorNote> notes;
    std::vector<int> flagged;  // sample indices violating monotonicity
};

// Component counts with single-sample forgiveness: an increase at sample i is
// a violation only if sample i+1 is still above the pre-increase count.
void evaluate_count_series(MonitorSeries& series);

using FrameSink = std::function<void(double t, const std::vector<Polyline>& curves,
                                     const std::vector<Vec2>& markers)>;

// Evolve two curves on a shared clock, sampling intersections every sample_dt
// (including t = 0). Identical initial vertex lists raise
// SimError("identical-inputs"). Dead curves contribute empty intersections.
MonitorSeries run_pair_monitor(const CsfState& a0, const CsfState& b0, double T,
                               double sample_dt, const FrameSink& frames = {});

// Same monitor over one curve's self-intersections.
MonitorSeries run_self_monitor(const CsfState& c0, double T, double sample_dt,
                               const FrameSink& frames = {});

// Dimension proxy scales used by every monitor: dyadic {16h, 8h, 4h, 2h}.
std::vector<double> monitor_dim_scales(double h);

// Shared sample assembly: cloud -> components (link 2h), measure, box dim.
IntersectionSample make_planar_sample(double t, std::vector<Vec2> pts, double h,
                                      int ambient_n);

}  // namespace mcflab
