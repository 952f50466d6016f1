#pragma once

// Mean curvature flow of rotationally symmetric hypersurfaces in R^{n+1},
// reduced to their meridian profile curve in a half-plane. Includes the two
// constructed counterexample surfaces: the thin "ring" torus with prescribed
// meridian curvature pins, and the dumbbell enclosing two spheres.

#include <optional>

#include "mcflab/csf.hpp"
#include "mcflab/geometry.hpp"

namespace mcflab {

enum class Axis { X, Y };  // rotation axis direction within the meridian plane

struct AxisymState {
    Polyline profile;  // meridian curve; r = distance to the rotation axis
    int n = 2;         // hypersurface dimension (surface of revolution in R^{n+1})
    double t = 0.0;
    bool alive = true;
    Axis axis = Axis::Y;
    bool reflection_symmetric = false;  // re-symmetrize across the mirror line each step
    double h_target = 0.0;

    double radius(const Vec2& p) const {
        return axis == Axis::Y ? std::abs(p.x) : std::abs(p.y);
    }
};

// Mean curvature at each profile vertex: H = kappa + (n-1) <nu, -e_r> / r,
// with nu the left normal of the tangent and e_r the unit vector pointing away
// from the rotation axis. Open-profile endpoints lying on the axis are poles:
// the neighbor is reflected across the axis and H = n * kappa there. Open
// endpoints off the axis use one-sided tangents with kappa = 0.
std::vector<double> mean_curvature(const AxisymState& state);

// Explicit Euler step of the profile by H*nu. CFL dt <= 0.25*h_min^2. Poles
// are clamped back onto the axis; an interior vertex reaching r < h_target/10
// raises SimError("axis-collision") (neck pinch). Resampling and liveness
// rules mirror the plane-curve flow.
void step_axisym(AxisymState& state, double dt);

double stable_dt_axisym(const AxisymState& state);

// --- Ring torus with prescribed meridian curvature ---------------------- //
//
// Closed convex meridian profile of width 1, symmetric under reflection across
// the r-axis (y = 0), so the surface is mirror symmetric across that hyperplane.
// Meridian curvature equals 10 exactly at the inner (min radius) crossing and
// 1/10 at the outer (max radius) crossing, stays >= 1/5 on the inner half, and
// attains its max/min only at those two crossings. The inner crossing sits at
// r = 10*n. Throws SimError("profile-closure-failed") if the two-parameter
// closure solve cannot meet these constraints.
AxisymState marriage_ring_profile(int n, double target_h);

struct RingSample {
    double t = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double measure = 0.0;  // (n-1)-measure of the two latitude spheres
};

struct RingSeries {
    std::vector<RingSample> samples;
    std::vector<IntersectionSample> clouds;  // reconstructed planar sections
    bool topology_change = false;
    std::vector<MonitorNote> notes;
};

// Evolve the ring and intersect with the fixed hyperplane through the axis
// (the mirror line y = 0 in the meridian): two latitude spheres of radii
// r_min(t), r_max(t). Truncates with topology_change if the crossing count
// leaves {2}.
RingSeries ring_intersection_series(const AxisymState& ring, double T, double sample_dt);

// --- Dumbbell ------------------------------------------------------------ //
//
// Even profile r = f(x) over [-(5L+10), 5L+10], rotated about the x-axis:
// a thin neck of radius eps on [-L, L], bells rising to 1.2L at x = +-4L via a
// quintic smoothstep, and elliptical caps meeting the axis perpendicularly.
// The bells strictly enclose the spheres of radius L centered at (+-4L, 0).
// Requires 0 < eps < L/10.
AxisymState dumbbell_profile(double L, double eps, double target_h);

struct DumbbellSample {
    double t = 0.0;
    int components = 0;     // ovals cut by the plane {z = plane_z}
    double measure = 0.0;   // total length of the section curves
    std::optional<double> dim_est;
    double min_sphere_clearance = 0.0;  // min over both spheres of dist(profile) - radius(t)
};

struct DumbbellSeries {
    std::vector<DumbbellSample> samples;
    std::vector<IntersectionSample> clouds;
    bool pinched = false;          // neck hit the axis during the run
    bool transition_detected = false;  // component count rose from 1
    bool spheres_enclosed = true;  // containment never violated beyond 3h
    std::vector<MonitorNote> notes;
};

// Evolve the dumbbell and intersect with the plane {z = plane_z} parallel to
// the axis. Section components are excursions of the profile above the plane
// height; their length is measured on both sheets of each oval. Sphere
// radii follow the exact law sqrt(L^2 - 2*n*t).
DumbbellSeries dumbbell_component_series(const AxisymState& dumbbell, double L,
                                         double plane_z, double T, double sample_dt);

// Latitude-sphere section as an intersection sample: the stored points are the
// meridian radii (r, 0); measure uses the (n-1)-sphere areas; the dimension
// proxy box-counts a planar reconstruction of each circle at arc spacing ~h.
// Radii below 2h sit under the probe floor and collapse to a single point.
IntersectionSample axisym_section_sample(double t, const std::vector<double>& radii,
                                         double h, int n);

// Compact two-disc-plus-neck meridian shape (discs of radius R at x = +-c,
// neck half-width w < R), used by the level-set scenarios: `outline` is the
// closed meridian curve (even in y), `arc` its upper half as an open profile
// with pole endpoints for the parametric cross-check.
Polyline compact_dumbbell_outline(double R, double c, double w, double target_h);
AxisymState compact_dumbbell_arc(double R, double c, double w, double target_h);

}  // namespace mcflab
