#include "mcflab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace mcflab {

namespace {

struct QPoint {
    int64_t x, y;
    bool operator<(const QPoint& o) const { return x < o.x || (x == o.x && y < o.y); }
};

}  // namespace

std::vector<Polyline> extract_contours(const ScalarField2D& f, double level) {
    std::vector<std::pair<Vec2, Vec2>> segs;
    auto val = [&](int i, int j) {
        double v = f.at(i, j) - level;
        return v == 0.0 ? 1e-12 : v;  // deterministic tie-break
    };
    auto interp = [&](int i0, int j0, int i1, int j1) -> Vec2 {
        double a = val(i0, j0), b = val(i1, j1);
        double t = a / (a - b);
        Vec2 p0 = f.pos(i0, j0), p1 = f.pos(i1, j1);
        return p0 + (p1 - p0) * t;
    };

    for (int j = 0; j + 1 < f.ny; ++j) {
        for (int i = 0; i + 1 < f.nx; ++i) {
            double v00 = val(i, j), v10 = val(i + 1, j);
            double v11 = val(i + 1, j + 1), v01 = val(i, j + 1);
            int idx = (v00 < 0 ? 1 : 0) | (v10 < 0 ? 2 : 0) | (v11 < 0 ? 4 : 0) |
                      (v01 < 0 ? 8 : 0);
            if (idx == 0 || idx == 15) continue;

            Vec2 bottom, right, top, left;
            bool hasB = (v00 < 0) != (v10 < 0);
            bool hasR = (v10 < 0) != (v11 < 0);
            bool hasT = (v01 < 0) != (v11 < 0);
            bool hasL = (v00 < 0) != (v01 < 0);
            if (hasB) bottom = interp(i, j, i + 1, j);
            if (hasR) right = interp(i + 1, j, i + 1, j + 1);
            if (hasT) top = interp(i, j + 1, i + 1, j + 1);
            if (hasL) left = interp(i, j, i, j + 1);

            switch (idx) {
                case 1: case 14: segs.emplace_back(bottom, left); break;
                case 2: case 13: segs.emplace_back(bottom, right); break;
                case 3: case 12: segs.emplace_back(left, right); break;
                case 4: case 11: segs.emplace_back(right, top); break;
                case 6: case 9:  segs.emplace_back(bottom, top); break;
                case 7: case 8:  segs.emplace_back(left, top); break;
                case 5: case 10: {
                    // saddle: connect according to the cell-center sign
                    double c = 0.25 * (v00 + v10 + v11 + v01);
                    bool center_neg = c < 0;
                    bool corners_neg = (idx == 5);  // v00 and v11 negative
                    if (center_neg == corners_neg) {
                        segs.emplace_back(bottom, right);
                        segs.emplace_back(left, top);
                    } else {
                        segs.emplace_back(bottom, left);
                        segs.emplace_back(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // chain segments: quantized endpoints, every junction has degree <= 2
    double q = 1e-6 * f.h;
    auto quant = [&](Vec2 p) -> QPoint {
        return {static_cast<int64_t>(std::llround(p.x / q)),
                static_cast<int64_t>(std::llround(p.y / q))};
    };
    std::map<QPoint, std::vector<int>> at_point;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        at_point[quant(segs[s].first)].push_back(s);
        at_point[quant(segs[s].second)].push_back(s);
    }

    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> curves;
    auto walk = [&](int start, bool from_first) {
        Polyline c;
        c.closed = false;
        int s = start;
        Vec2 cur = from_first ? segs[s].first : segs[s].second;
        c.vertices.push_back(cur);
        while (true) {
            used[s] = true;
            Vec2 nxt = quant(segs[s].first).x == quant(cur).x &&
                               quant(segs[s].first).y == quant(cur).y
                           ? segs[s].second
                           : segs[s].first;
            c.vertices.push_back(nxt);
            cur = nxt;
            int next_seg = -1;
            for (int cand : at_point[quant(cur)])
                if (!used[cand]) {
                    next_seg = cand;
                    break;
                }
            if (next_seg < 0) break;
            s = next_seg;
        }
        return c;
    };

    // open chains first (endpoints of degree 1), then leftover loops
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        if (used[s]) continue;
        bool first_open = at_point[quant(segs[s].first)].size() == 1;
        bool second_open = at_point[quant(segs[s].second)].size() == 1;
        if (first_open || second_open) curves.push_back(walk(s, first_open));
    }
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        if (used[s]) continue;
        Polyline c = walk(s, true);
        if (c.size() >= 4 && dist(c.vertices.front(), c.vertices.back()) < q * 10) {
            c.vertices.pop_back();
            c.closed = true;
        }
        curves.push_back(std::move(c));
    }
    // drop degenerate stubs
    std::erase_if(curves, [](const Polyline& c) {
        return c.size() < 2 || polyline_length(c) <= 0.0;
    });
    return curves;
}

double contours_length(const std::vector<Polyline>& curves) {
    double L = 0.0;
    for (const auto& c : curves) L += polyline_length(c);
    return L;
}

static double point_seg_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = norm2(ab) > 0 ? std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0) : 0.0;
    return dist(p, a + ab * t);
}

double dist_to_polylines(Vec2 p, const std::vector<Polyline>& curves) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) {
        int ne = c.closed ? c.size() : c.size() - 1;
        for (int i = 0; i < ne; ++i)
            best = std::min(best, point_seg_dist(p, c.vertices[i], c.at_wrapped(i + 1)));
    }
    return best;
}

static double one_sided_hausdorff(const std::vector<Polyline>& a,
                                  const std::vector<Polyline>& b) {
    double worst = 0.0;
    for (const auto& c : a)
        for (const Vec2& v : c.vertices)
            worst = std::max(worst, dist_to_polylines(v, b));
    return worst;
}

double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
    bool ea = a.empty(), eb = b.empty();
    if (ea && eb) return 0.0;
    if (ea || eb) return std::numeric_limits<double>::infinity();
    return std::max(one_sided_hausdorff(a, b), one_sided_hausdorff(b, a));
}

std::vector<Vec2> horizontal_line_crossings(const std::vector<Polyline>& curves, double c) {
    std::vector<Vec2> out;
    for (const auto& curve : curves) {
        int ne = curve.closed ? curve.size() : curve.size() - 1;
        for (int i = 0; i < ne; ++i) {
            Vec2 a = curve.vertices[i], b = curve.at_wrapped(i + 1);
            double fa = a.y - c, fb = b.y - c;
            if (fa == 0.0) fa = 1e-15;
            if (fb == 0.0) fb = 1e-15;
            if ((fa < 0) != (fb < 0)) {
                double t = fa / (fa - fb);
                out.push_back(a + (b - a) * t);
            }
        }
    }
    return out;
}

}  // namespace mcflab
