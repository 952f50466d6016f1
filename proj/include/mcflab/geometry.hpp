#pragma once

// Shared geometric substrate: polylines, scalar grids, point clouds, and the
// measurement kit (intersection extraction, component counts, box-counting
// dimension, Hausdorff-measure proxies) used by every flow module.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcflab {

class SimError : public std::runtime_error {
public:
    SimError(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Oriented curve. closed=true means vertices wrap around (no duplicated
// endpoint); closed curves are conventionally CCW so the left normal of the
// tangent points inward.
struct Polyline {
    std::vector<Vec2> vertices;
    bool closed = true;

    int size() const { return static_cast<int>(vertices.size()); }
    Vec2 at_wrapped(int i) const {
        int n = size();
        return vertices[((i % n) + n) % n];
    }
};

bool polyline_valid(const Polyline& p);
double polyline_length(const Polyline& p);
double min_edge_length(const Polyline& p);
double max_edge_length(const Polyline& p);
double mean_edge_length(const Polyline& p);  // the curve's "sampling scale"
double signed_area(const Polyline& p);       // shoelace; closed curves only
double turning_number(const Polyline& p);    // total turning / 2pi

// Arclength-uniform resampling by linear interpolation along the polyline.
// Closed curves get round(L/target_h) vertices (forced even, >= 8 so mirror
// symmetrization stays index-aligned); open curves keep both endpoints.
// Throws SimError("curve-too-short") when L < 3*target_h.
Polyline resample(const Polyline& curve, double target_h);

// Signed per-vertex curvature via the circumscribed circle through each vertex
// and its neighbours (positive for a CCW-convex curve). Endpoints of open
// curves get 0. Collinear triples give exactly 0.
std::vector<double> curvature(const Polyline& curve);

// Per-vertex unit tangents (central differences of neighbours; one-sided at
// open ends). Left normal of these is the inward normal for CCW closed curves.
std::vector<Vec2> tangents(const Polyline& curve);

// CloudKind::AxisymRadii means each point's x coordinate is the radius r >= 0
// of an (n-1)-sphere of revolution; y is carried along for bookkeeping only.
enum class CloudKind { Planar, AxisymRadii };

struct PointCloud {
    std::vector<Vec2> points;
    int ambient_n = 1;
    CloudKind kind = CloudKind::Planar;

    bool empty() const { return points.empty(); }
    int size() const { return static_cast<int>(points.size()); }
};

// Row-major scalar grid; origin is the position of node (0,0), spacing h.
// ny == 1 marks a 1-D field on an interval; otherwise nx, ny >= 8.
struct ScalarField2D {
    std::vector<double> values;
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    Vec2 origin;

    double& at(int i, int j) { return values[static_cast<size_t>(j) * nx + i]; }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * nx + i]; }
    Vec2 pos(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
    bool valid() const;
};

ScalarField2D make_field(int nx, int ny, double h, Vec2 origin, double fill = 0.0);

// All transverse crossings between two polylines, deduplicated within
// dedup_r = h/4 (h = finer mean edge length of the two). Tangential contacts
// (segment pairs within tol_touch = h/2 that never produce a sign change)
// collapse to one point per contact region.
std::vector<Vec2> polyline_intersections(const Polyline& a, const Polyline& b);

// Transverse crossings between non-adjacent edges of one curve, deduplicated
// the same way.
std::vector<Vec2> self_intersections(const Polyline& curve);

// Single-linkage components: points within link_r are connected.
int count_components(const std::vector<Vec2>& points, double link_r);
std::vector<int> component_labels(const std::vector<Vec2>& points, double link_r);

// Box-counting dimension: occupied-box counts on dyadic grids anchored at the
// cloud's bounding-box min corner, OLS slope of log N against log(1/eps).
// Requires >= 4 scales spanning a factor >= 8 (SimError("insufficient-scales"));
// empty cloud -> nullopt; single point -> 0.
std::optional<double> box_dimension(const PointCloud& cloud,
                                    const std::vector<double>& scales);

// Geometric sequence of box scales {coarsest, coarsest/2, ...}, length k >= 4.
std::vector<double> dyadic_scales(double coarsest, int k);

// Area of the unit (n-1)-sphere: C_1 = 2pi, C_2 = 4pi, ...
double unit_sphere_area(int n_minus_1);

// H^{n-1} proxy of a cloud (n = cloud.ambient_n). Planar mode: n == 1 counts
// points (H^0); n == 2 chains the cloud (per-component minimum spanning tree
// with link radius cover_r) and returns total length (H^1). Axisym mode: sum
// of C_{n-1} * r^{n-1} over radii, exact for sphere intersections; negative
// radii raise SimError("invalid-radius").
double measure_estimate(const PointCloud& cloud, double cover_r);

// One monitoring sample of an intersection set. components == 0 iff points is
// empty; empty points imply measure_est == 0 (a nonempty degenerate set may
// still carry measure 0, e.g. a single cone vertex in axisym mode).
struct IntersectionSample {
    double t = 0.0;
    PointCloud points;
    int component_count = 0;
    double measure_est = 0.0;
    std::optional<double> dim_est;
};

bool sample_invariants_ok(const IntersectionSample& s);

// CSV row: t,components,measure,dim,x1,y1,x2,y2,...  (dim blank when undefined)
void write_sample_csv_row(std::ostream& os, const IntersectionSample& s);
std::string sample_to_json(const IntersectionSample& s);

// Deterministic shortest-round-trip double formatting shared by every CSV/JSON
// writer so identical runs produce identical bytes.
std::string format_double(double v);

}  // namespace mcflab
