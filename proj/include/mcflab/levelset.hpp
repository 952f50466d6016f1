#pragma once

// Grid level-set flow (planar and axisymmetric meridian), inner/outer track
// extraction, the fattening metric, the localizability check, and the double
// cone scenario.

#include <optional>

#include "mcflab/axisym.hpp"
#include "mcflab/contour.hpp"
#include "mcflab/csf.hpp"
#include "mcflab/geometry.hpp"

namespace mcflab {

enum class LsMode { Planar, Axisym };

struct LevelSetState {
    ScalarField2D phi;  // approximate signed distance, negative inside
    double t = 0.0;
    LsMode mode = LsMode::Planar;
    int n = 1;          // hypersurface dimension (planar curves: 1)
    Axis axis = Axis::Y;  // axisym: rotation axis direction in the meridian plane
    int reinit_every = 10;
    int steps_since_reinit = 0;

    double thin_tol() const { return 3.0 * phi.h; }
};

// Fast-sweeping redistance: nodes adjacent to the zero set are pinned by
// subcell interpolation, the rest solved by Godunov upwind sweeps (4 orderings
// x 2 passes). Moves the zero set by less than h/2.
void reinitialize(LevelSetState& state);

// One explicit step of motion by mean curvature of all level sets,
//   phi_t = (phi_xx phi_y^2 - 2 phi_x phi_y phi_xy + phi_yy phi_x^2)/|grad|^2,
// |grad|^2 floored at 1e-16. Axisym mode adds (n-1)*phi_r/r, where the
// quotient switches to its even-reflection limit (n-1)*phi_rr within 1.5h of
// the axis. Boundary rows copy their interior neighbor (Neumann). Requires
// dt <= 0.2 h^2; reinitializes every reinit_every steps.
void evolve_levelset(LevelSetState& state, double dt);

// Safe explicit step: 0.9 * 0.2 h^2 planar; axisym shrinks by the extra radial
// diffusion (the even-reflection rule doubles it at the axis).
double levelset_dt(const LevelSetState& state);

// Signed distance field for a polyline set: negative inside the region
// enclosed by the curves (even-odd rule), sampled on the given grid geometry.
ScalarField2D rasterize_signed_distance(const std::vector<Polyline>& curves, int nx,
                                        int ny, double h, Vec2 origin);

std::vector<Polyline> zero_set(const LevelSetState& state);

struct InnerOuterTrack {
    double t = 0.0;
    std::vector<Polyline> outer, inner;
    double discrepancy = 0.0;  // Hausdorff distance between the two tracks
};

// Outer/inner tracks as the +-thin_tol/2 offsets of phi, each vertex projected
// back along the sampled gradient (step clamped at 2*thin_tol; skipped where
// |grad phi| < 0.25). Non-fattening runs keep the tracks within 2h of each
// other; a fattened band holds them apart.
InnerOuterTrack track_inner_outer(const LevelSetState& state);

struct FatteningReport {
    double t = 0.0;
    double fat_volume = 0.0;   // band area beyond the expected tube, clamped at 0
    double discrepancy = 0.0;  // inner/outer Hausdorff distance
    bool fattening_now = false;  // this sample alone; verdicts need two in a row
    double fat_threshold = 0.0;  // 10*h^2 (the measurement scale for areas)
};

FatteningReport fattening_report(const LevelSetState& state);

// Area of {phi < c} by per-cell linear clipping (exact for the interpolant).
double sublevel_area(const ScalarField2D& f, double c);

struct MaskSpec {
    bool is_disk = true;
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
    Vec2 normal{1.0, 0.0};  // half-plane: inside K iff dot(normal, p) >= offset
    double offset = 0.0;

    bool inside(const Vec2& p) const {
        if (is_disk) return dist(p, center) <= radius;
        return dot(normal, p) >= offset;
    }
    // Signed boundary gauge: zero on the mask boundary, negative inside.
    double gauge(const Vec2& p) const {
        if (is_disk) return dist(p, center) - radius;
        return offset - dot(normal, p);
    }
};

struct LocalizabilitySample {
    double t = 0.0;
    double union_gap = 0.0;  // Hausdorff(whole zero set, union of piece zero sets)
    double piece_gap = 0.0;  // min distance between the two piece zero sets
};

struct LocalizabilityResult {
    bool pass = false;
    std::vector<LocalizabilitySample> samples;
    std::vector<int> flagged;
    std::vector<MonitorNote> notes;
};

// Split the zero set of `at_t0` along the mask boundary, evolve whole and both
// pieces on the same grid, and compare: pass iff the union of piece zero sets
// stays within 2h Hausdorff of the whole zero set at every sample and the
// pieces stay more than 2h apart for t > t0. Precondition: the zero set meets
// the mask boundary in at most finitely many points, pairwise more than 2h
// apart after merging within-2h duplicates ("intersection-too-large").
LocalizabilityResult localizability_check(const LevelSetState& at_t0, const MaskSpec& K,
                                          double T, double sample_dt);

struct ConeSample {
    double t = 0.0;
    std::vector<double> radii;  // plane-section radii (usually one)
    IntersectionSample cloud;
    double fat_volume = 0.0;
    double discrepancy = 0.0;
};

struct ConeSeries {
    std::vector<ConeSample> samples;
    bool fattening = false;     // fat_volume above threshold on two consecutive samples
    bool monotone_dim = true;   // dim_est non-increasing (0.2 tolerance)
    std::vector<int> dim_flagged;
    double h = 0.0;
    std::vector<MonitorNote> notes;
};

// Double cone {m|x| = |y|} (m = cot(aperture), aperture measured from the
// rotation axis; wide apertures sit close to the plane), rotated about the y
// axis (n = 2), cut by the plane {y = plane_offset}. The t = 0 sample reads
// the raw zero contour of the exact initial signed distance; later samples
// intersect the projected outer track with the plane. Section radii below 2h
// collapse to a single axis point (below the dimension-probe floor).
ConeSeries cone_intersection_scenario(double aperture_deg, double plane_offset, double T,
                                      double sample_dt, int grid_n);

// Dimension monotonicity over samples with defined dim_est: a later defined
// dim exceeding an earlier one by more than tol flags the pair.
struct DimVerdict {
    bool monotone = true;
    std::vector<int> flagged;
};
DimVerdict evaluate_dim_series(const std::vector<IntersectionSample>& samples,
                               double tol = 0.2);

}  // namespace mcflab
