#include "mcflab/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace mcflab {

std::string format_double(double v) {
    // shortest round-trip form; NaN/inf normalized so CSV stays parseable
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool polyline_valid(const Polyline& p) {
    int n = p.size();
    if (n < (p.closed ? 3 : 2)) return false;
    for (const Vec2& v : p.vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
    int edges = p.closed ? n : n - 1;
    for (int i = 0; i < edges; ++i)
        if (dist(p.vertices[i], p.at_wrapped(i + 1)) <= 0.0) return false;
    return true;
}

static int edge_count(const Polyline& p) {
    return p.closed ? p.size() : p.size() - 1;
}

double polyline_length(const Polyline& p) {
    double L = 0.0;
    for (int i = 0; i < edge_count(p); ++i)
        L += dist(p.vertices[i], p.at_wrapped(i + 1));
    return L;
}

double min_edge_length(const Polyline& p) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < edge_count(p); ++i)
        m = std::min(m, dist(p.vertices[i], p.at_wrapped(i + 1)));
    return m;
}

double max_edge_length(const Polyline& p) {
    double m = 0.0;
    for (int i = 0; i < edge_count(p); ++i)
        m = std::max(m, dist(p.vertices[i], p.at_wrapped(i + 1)));
    return m;
}

double mean_edge_length(const Polyline& p) {
    return polyline_length(p) / edge_count(p);
}

double signed_area(const Polyline& p) {
    if (!p.closed) return 0.0;
    double a = 0.0;
    for (int i = 0; i < p.size(); ++i)
        a += cross(p.vertices[i], p.at_wrapped(i + 1));
    return 0.5 * a;
}

double turning_number(const Polyline& p) {
    int ne = edge_count(p);
    double total = 0.0;
    int last = p.closed ? ne : ne - 1;
    for (int i = 0; i < last; ++i) {
        Vec2 e0 = p.at_wrapped(i + 1) - p.at_wrapped(i);
        Vec2 e1 = p.at_wrapped(i + 2) - p.at_wrapped(i + 1);
        total += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    return total / (2.0 * M_PI);
}

Polyline resample(const Polyline& curve, double target_h) {
    if (!polyline_valid(curve) || target_h <= 0.0)
        throw SimError("invalid-curve", "resample needs a valid polyline and target_h > 0");
    double L = polyline_length(curve);
    if (L < 3.0 * target_h)
        throw SimError("curve-too-short", "total length " + format_double(L) +
                                              " < 3*target_h");

    // cumulative arclength over edges
    int ne = edge_count(curve);
    std::vector<double> cum(ne + 1, 0.0);
    for (int i = 0; i < ne; ++i)
        cum[i + 1] = cum[i] + dist(curve.vertices[i], curve.at_wrapped(i + 1));

    auto point_at = [&](double s) -> Vec2 {
        s = std::clamp(s, 0.0, cum[ne]);
        int lo = int(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
        lo = std::clamp(lo, 0, ne - 1);
        double seg = cum[lo + 1] - cum[lo];
        double f = seg > 0 ? (s - cum[lo]) / seg : 0.0;
        Vec2 a = curve.vertices[lo], b = curve.at_wrapped(lo + 1);
        return a + (b - a) * f;
    };

    Polyline out;
    out.closed = curve.closed;
    if (curve.closed) {
        long m = std::lround(L / target_h);
        if (m % 2) ++m;           // even count keeps mirror pairs index-aligned
        m = std::max(m, 8L);
        out.vertices.reserve(m);
        for (long i = 0; i < m; ++i) out.vertices.push_back(point_at(L * i / m));
    } else {
        long m = std::max(2L, std::lround(L / target_h));
        out.vertices.reserve(m + 1);
        for (long i = 0; i < m; ++i) out.vertices.push_back(point_at(L * i / m));
        out.vertices.push_back(curve.vertices.back());  // endpoint kept exactly
    }
    return out;
}

std::vector<double> curvature(const Polyline& curve) {
    int n = curve.size();
    std::vector<double> k(n, 0.0);
    int lo = curve.closed ? 0 : 1;
    int hi = curve.closed ? n : n - 1;
    for (int i = lo; i < hi; ++i) {
        Vec2 a = curve.at_wrapped(i - 1), b = curve.vertices[i], c = curve.at_wrapped(i + 1);
        double la = dist(a, b), lb = dist(b, c), lc = dist(a, c);
        double denom = la * lb * lc;
        if (denom <= 0.0) continue;
        // 4*area / (product of sides) = inverse circumradius, signed
        k[i] = 2.0 * cross(b - a, c - a) / denom;
    }
    return k;
}

std::vector<Vec2> tangents(const Polyline& curve) {
    int n = curve.size();
    std::vector<Vec2> t(n);
    for (int i = 0; i < n; ++i) {
        Vec2 d;
        if (curve.closed) {
            d = curve.at_wrapped(i + 1) - curve.at_wrapped(i - 1);
        } else if (i == 0) {
            d = curve.vertices[1] - curve.vertices[0];
        } else if (i == n - 1) {
            d = curve.vertices[n - 1] - curve.vertices[n - 2];
        } else {
            d = curve.vertices[i + 1] - curve.vertices[i - 1];
        }
        double l = norm(d);
        t[i] = l > 0 ? d / l : Vec2{1, 0};
    }
    return t;
}

bool ScalarField2D::valid() const {
    if (nx < 8 || ny < 1 || (ny > 1 && ny < 8) || h <= 0) return false;
    if (values.size() != static_cast<size_t>(nx) * ny) return false;
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

ScalarField2D make_field(int nx, int ny, double h, Vec2 origin, double fill) {
    ScalarField2D f;
    f.nx = nx;
    f.ny = ny;
    f.h = h;
    f.origin = origin;
    f.values.assign(static_cast<size_t>(nx) * ny, fill);
    return f;
}

// ---------------------------------------------------------------------------
// segment utilities

namespace {

struct Seg {
    Vec2 a, b;
};

// closest-approach distance between two segments plus the midpoint of the
// closest pair of points
double seg_seg_distance(const Seg& s, const Seg& t, Vec2* mid) {
    Vec2 u = s.b - s.a, v = t.b - t.a, w = s.a - t.a;
    double A = dot(u, u), B = dot(u, v), C = dot(v, v);
    double D = dot(u, w), E = dot(v, w);
    double den = A * C - B * B;
    double sc, tc;
    if (den < 1e-14 * A * C + 1e-300) {  // nearly parallel
        sc = 0.0;
        tc = C > 0 ? E / C : 0.0;
    } else {
        sc = (B * E - C * D) / den;
        tc = (A * E - B * D) / den;
    }
    sc = std::clamp(sc, 0.0, 1.0);
    // re-project tc for the clamped sc, then clamp and re-project sc once
    tc = C > 0 ? std::clamp(dot((s.a + u * sc) - t.a, v) / C, 0.0, 1.0) : 0.0;
    sc = A > 0 ? std::clamp(dot((t.a + v * tc) - s.a, u) / A, 0.0, 1.0) : 0.0;
    Vec2 ps = s.a + u * sc, pt = t.a + v * tc;
    if (mid) *mid = (ps + pt) * 0.5;
    return dist(ps, pt);
}

// transverse crossing test; on success writes the crossing point
bool seg_seg_crossing(const Seg& s, const Seg& t, Vec2* out) {
    Vec2 u = s.b - s.a, v = t.b - t.a;
    double d1 = cross(v, s.a - t.a);
    double d2 = cross(v, s.b - t.a);
    double d3 = cross(u, t.a - s.a);
    double d4 = cross(u, t.b - s.a);
    if ((d1 > 0) != (d2 > 0) && (d3 > 0) != (d4 > 0) && d1 != d2 && d3 != d4) {
        double denom = cross(u, v);
        if (denom == 0.0) return false;
        double tt = cross(t.a - s.a, v) / denom;
        *out = s.a + u * std::clamp(tt, 0.0, 1.0);
        return true;
    }
    // exact endpoint hit: rare, but a crossing straight through a vertex must
    // not vanish between the strict test and the tangential filter
    Vec2 mid;
    double scale = std::max({norm(u), norm(v), 1e-300});
    if (seg_seg_distance(s, t, &mid) < 1e-12 * scale) {
        bool side_change = (d1 > 0) != (d2 > 0) || (d3 > 0) != (d4 > 0);
        if (side_change) {
            *out = mid;
            return true;
        }
    }
    return false;
}

std::vector<Seg> edges_of(const Polyline& p) {
    std::vector<Seg> e;
    int n = p.closed ? p.size() : p.size() - 1;
    e.reserve(n);
    for (int i = 0; i < n; ++i) e.push_back({p.vertices[i], p.at_wrapped(i + 1)});
    return e;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// single-linkage clusters -> centroids
std::vector<Vec2> cluster_points(const std::vector<Vec2>& pts, double radius) {
    int n = static_cast<int>(pts.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(pts[i], pts[j]) <= radius) uf.unite(i, j);
    std::vector<Vec2> sum(n);
    std::vector<int> cnt(n, 0), order;
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (cnt[r] == 0) order.push_back(r);
        sum[r] += pts[i];
        cnt[r]++;
    }
    std::vector<Vec2> out;
    out.reserve(order.size());
    for (int r : order) out.push_back(sum[r] / cnt[r]);
    return out;
}

std::vector<Vec2> intersect_edge_sets(const std::vector<Seg>& ea, const std::vector<Seg>& eb,
                                      double h, bool same_curve) {
    double dedup_r = h / 4.0;
    double tol_touch = h / 2.0;

    std::vector<Vec2> crossings;
    std::vector<Vec2> touches;
    int na = static_cast<int>(ea.size());
    int nb = static_cast<int>(eb.size());
    for (int i = 0; i < na; ++i) {
        int jstart = same_curve ? i + 2 : 0;
        for (int j = jstart; j < nb; ++j) {
            if (same_curve && i == 0 && j == nb - 1) continue;  // wrap-adjacent
            Vec2 p;
            if (seg_seg_crossing(ea[i], eb[j], &p)) {
                crossings.push_back(p);
            } else if (!same_curve) {
                Vec2 mid;
                if (seg_seg_distance(ea[i], eb[j], &mid) < tol_touch)
                    touches.push_back(mid);
            }
        }
    }

    std::vector<Vec2> out = cluster_points(crossings, dedup_r);

    if (!touches.empty()) {
        // a touch chain that reaches to within 3h of a real crossing is just
        // that crossing's shoulder, not a tangency
        int n = static_cast<int>(touches.size());
        UnionFind uf(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (dist(touches[i], touches[j]) <= 2.0 * h) uf.unite(i, j);
        std::vector<bool> near_crossing(n, false);
        for (int i = 0; i < n; ++i)
            for (const Vec2& c : out)
                if (dist(touches[i], c) <= 3.0 * h) {
                    near_crossing[uf.find(i)] = true;
                    break;
                }
        std::vector<Vec2> sum(n);
        std::vector<int> cnt(n, 0), order;
        for (int i = 0; i < n; ++i) {
            int r = uf.find(i);
            if (cnt[r] == 0) order.push_back(r);
            sum[r] += touches[i];
            cnt[r]++;
        }
        for (int r : order)
            if (!near_crossing[r]) out.push_back(sum[r] / cnt[r]);
    }
    return out;
}

}  // namespace

std::vector<Vec2> polyline_intersections(const Polyline& a, const Polyline& b) {
    if (!polyline_valid(a) || !polyline_valid(b))
        throw SimError("invalid-curve", "polyline_intersections needs valid curves");
    double h = std::min(mean_edge_length(a), mean_edge_length(b));
    return intersect_edge_sets(edges_of(a), edges_of(b), h, false);
}

std::vector<Vec2> self_intersections(const Polyline& curve) {
    if (!polyline_valid(curve))
        throw SimError("invalid-curve", "self_intersections needs a valid curve");
    auto e = edges_of(curve);
    return intersect_edge_sets(e, e, mean_edge_length(curve), true);
}

std::vector<int> component_labels(const std::vector<Vec2>& points, double link_r) {
    int n = static_cast<int>(points.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(points[i], points[j]) <= link_r) uf.unite(i, j);
    std::vector<int> label(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (label[r] < 0) label[r] = next++;
        label[i] = label[r];
    }
    return label;
}

int count_components(const std::vector<Vec2>& points, double link_r) {
    if (points.empty()) return 0;
    auto l = component_labels(points, link_r);
    return 1 + *std::max_element(l.begin(), l.end());
}

std::vector<double> dyadic_scales(double coarsest, int k) {
    std::vector<double> s(k);
    for (int i = 0; i < k; ++i) s[i] = coarsest / double(1 << i);
    return s;
}

std::optional<double> box_dimension(const PointCloud& cloud,
                                    const std::vector<double>& scales) {
    if (cloud.empty()) return std::nullopt;
    if (scales.size() < 4)
        throw SimError("insufficient-scales", "need >= 4 box-counting scales");
    double smax = *std::max_element(scales.begin(), scales.end());
    double smin = *std::min_element(scales.begin(), scales.end());
    if (smin <= 0 || smax / smin < 8.0 * (1.0 - 1e-12))
        throw SimError("insufficient-scales", "scales must span a factor >= 8");

    Vec2 lo = cloud.points[0];
    for (const Vec2& p : cloud.points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
    }
    std::vector<double> xs, ys;
    for (double eps : scales) {
        std::unordered_set<int64_t> boxes;
        for (const Vec2& p : cloud.points) {
            int64_t ix = static_cast<int64_t>(std::floor((p.x - lo.x) / eps));
            int64_t iy = static_cast<int64_t>(std::floor((p.y - lo.y) / eps));
            boxes.insert(ix * 2000003 + iy);
        }
        xs.push_back(std::log(1.0 / eps));
        ys.push_back(std::log(double(boxes.size())));
    }
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

double unit_sphere_area(int n_minus_1) {
    int n = n_minus_1 + 1;  // sphere S^{n-1} sits in R^n
    return 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
}

double measure_estimate(const PointCloud& cloud, double cover_r) {
    const int ambient_n = cloud.ambient_n;
    if (cloud.empty()) return 0.0;
    if (cloud.kind == CloudKind::AxisymRadii) {
        double sum = 0.0;
        for (const Vec2& p : cloud.points) {
            double r = p.x;
            if (r < -1e-12)
                throw SimError("invalid-radius", "negative radius " + format_double(r));
            r = std::max(r, 0.0);
            sum += unit_sphere_area(ambient_n - 1) * std::pow(r, ambient_n - 1);
        }
        return sum;
    }
    if (ambient_n <= 1) return double(cloud.size());  // H^0

    // H^1: chained length = per-component minimum spanning tree (Prim). The
    // bottleneck property keeps every MST edge <= cover_r inside a component.
    auto labels = component_labels(cloud.points, cover_r);
    int ncomp = 1 + *std::max_element(labels.begin(), labels.end());
    double total = 0.0;
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < cloud.size(); ++i)
            if (labels[i] == c) idx.push_back(i);
        int m = static_cast<int>(idx.size());
        if (m < 2) continue;
        std::vector<double> best(m, std::numeric_limits<double>::infinity());
        std::vector<bool> used(m, false);
        best[0] = 0.0;
        for (int it = 0; it < m; ++it) {
            int u = -1;
            for (int i = 0; i < m; ++i)
                if (!used[i] && (u < 0 || best[i] < best[u])) u = i;
            used[u] = true;
            total += best[u];
            for (int i = 0; i < m; ++i)
                if (!used[i])
                    best[i] = std::min(best[i], dist(cloud.points[idx[u]], cloud.points[idx[i]]));
        }
    }
    return total;
}

bool sample_invariants_ok(const IntersectionSample& s) {
    if ((s.component_count == 0) != s.points.empty()) return false;
    if (s.points.empty() && s.measure_est != 0.0) return false;
    if (s.measure_est < 0.0) return false;
    if (s.dim_est && (*s.dim_est < -0.2 || *s.dim_est > s.points.ambient_n + 0.2))
        return false;
    return true;
}

void write_sample_csv_row(std::ostream& os, const IntersectionSample& s) {
    os << format_double(s.t) << ',' << s.component_count << ','
       << format_double(s.measure_est) << ',';
    if (s.dim_est) os << format_double(*s.dim_est);
    for (const Vec2& p : s.points.points)
        os << ',' << format_double(p.x) << ',' << format_double(p.y);
    os << '\n';
}

std::string sample_to_json(const IntersectionSample& s) {
    std::string j = "{\"t\":" + format_double(s.t) +
                    ",\"components\":" + std::to_string(s.component_count) +
                    ",\"measure\":" + format_double(s.measure_est) + ",\"dim\":";
    j += s.dim_est ? format_double(*s.dim_est) : std::string("null");
    j += ",\"points\":[";
    for (int i = 0; i < s.points.size(); ++i) {
        if (i) j += ',';
        j += "[" + format_double(s.points.points[i].x) + "," +
             format_double(s.points.points[i].y) + "]";
    }
    j += "]}";
    return j;
}

}  // namespace mcflab
