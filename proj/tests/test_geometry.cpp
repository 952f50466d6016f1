#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mcflab/geometry.hpp"

using namespace mcflab;

namespace {

Polyline circle(Vec2 c, double r, int nv) {
    Polyline p;
    p.closed = true;
    for (int i = 0; i < nv; ++i) {
        const double a = 2.0 * M_PI * i / nv;
        p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return p;
}

}  // namespace

TEST_CASE("format_double round-trips and is minimal") {
    for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 1e300, 0.0, 123456789.123456789}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("polyline length, area, turning number") {
    auto c = circle({0, 0}, 1.0, 720);
    // Inscribed regular 720-gon: perimeter 2*n*sin(pi/n).
    CHECK(polyline_length(c) == doctest::Approx(720 * 2 * std::sin(M_PI / 720)).epsilon(1e-12));
    CHECK(signed_area(c) == doctest::Approx(M_PI).epsilon(1e-4));
    CHECK(turning_number(c) == doctest::Approx(1.0).epsilon(1e-9));
    std::reverse(c.vertices.begin(), c.vertices.end());
    CHECK(turning_number(c) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(signed_area(c) == doctest::Approx(-M_PI).epsilon(1e-4));
}

TEST_CASE("resample keeps endpoints, even closed counts, and length") {
    auto c = circle({0, 0}, 1.0, 700);
    auto r = resample(c, 0.05);
    CHECK(r.vertices.size() % 2 == 0);
    CHECK(r.vertices.size() >= 8);
    CHECK(r.vertices.front().x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(polyline_length(r) == doctest::Approx(polyline_length(c)).epsilon(1e-3));

    Polyline seg;
    seg.closed = false;
    seg.vertices = {{0, 0}, {0.3, 0.1}, {1, 0}};
    auto rs = resample(seg, 0.05);
    CHECK(rs.vertices.front() == seg.vertices.front());
    CHECK(rs.vertices.back() == seg.vertices.back());

    Polyline tiny;
    tiny.closed = false;
    tiny.vertices = {{0, 0}, {0.01, 0}};
    CHECK_THROWS_WITH_AS(resample(tiny, 0.1), doctest::Contains("curve-too-short"), SimError);
}

TEST_CASE("circumcircle curvature is exact on circles") {
    // Three concyclic points determine the circle exactly, so the estimate has
    // no truncation error at all on a circular polygon.
    auto c = circle({0.3, -0.2}, 0.5, 256);
    for (double k : curvature(c)) CHECK(k == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("pair intersections of two overlapping unit circles") {
    // Centers (+-1/2, 0): crossings at (0, +-sqrt(3)/2).
    auto a = circle({-0.5, 0}, 1.0, 512);
    auto b = circle({+0.5, 0}, 1.0, 512);
    auto hits = polyline_intersections(a, b);
    REQUIRE(hits.size() == 2);
    std::sort(hits.begin(), hits.end(), [](Vec2 p, Vec2 q) { return p.y < q.y; });
    CHECK(hits[0].x == doctest::Approx(0.0).epsilon(0.01));
    CHECK(hits[0].y == doctest::Approx(-std::sqrt(3.0) / 2).epsilon(0.01));
    CHECK(hits[1].y == doctest::Approx(+std::sqrt(3.0) / 2).epsilon(0.01));
}

TEST_CASE("self intersections of the standard immersed curves") {
    Polyline eight;
    eight.closed = true;
    for (int i = 0; i < 1024; ++i) {
        const double th = 2.0 * M_PI * i / 1024;
        eight.vertices.push_back({0.7 * std::sin(th), 0.7 * std::sin(th) * std::cos(th)});
    }
    CHECK(self_intersections(eight).size() == 1);

    Polyline tref;
    tref.closed = true;
    for (int i = 0; i < 2048; ++i) {
        const double th = 2.0 * M_PI * i / 2048;
        tref.vertices.push_back({0.25 * (std::sin(th) + 2 * std::sin(2 * th)),
                                 0.25 * (std::cos(th) - 2 * std::cos(2 * th))});
    }
    CHECK(self_intersections(tref).size() == 3);
}

TEST_CASE("box dimension hits line, area, and Cantor oracles") {
    const double h = 1.0 / 256;
    const auto scales = dyadic_scales(16 * h, 4);

    PointCloud seg;
    seg.ambient_n = 2;
    for (int i = 0; i <= 4096; ++i) seg.points.push_back({i / 4096.0, 0.37});
    auto d1 = box_dimension(seg, scales);
    REQUIRE(d1.has_value());
    CHECK(*d1 == doctest::Approx(1.0).epsilon(0.08));

    PointCloud sq;
    sq.ambient_n = 2;
    for (int i = 0; i <= 128; ++i)
        for (int j = 0; j <= 128; ++j) sq.points.push_back({i / 128.0, j / 128.0});
    auto d2 = box_dimension(sq, scales);
    REQUIRE(d2.has_value());
    CHECK(*d2 == doctest::Approx(2.0).epsilon(0.08));

    // Middle-thirds Cantor set, depth 9: dim log2/log3 = 0.6309...
    std::vector<double> xs{0.0};
    double scale = 1.0;
    for (int lev = 0; lev < 9; ++lev) {
        scale /= 3.0;
        std::vector<double> next;
        for (double x : xs) {
            next.push_back(x);
            next.push_back(x + 2 * scale);
        }
        xs = std::move(next);
    }
    PointCloud cantor;
    cantor.ambient_n = 2;
    for (double x : xs) cantor.points.push_back({x, 0.0});
    auto dc = box_dimension(cantor, scales);
    REQUIRE(dc.has_value());
    CHECK(*dc == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.13));

    PointCloud one{{{0.5, 0.5}}, 2, CloudKind::Planar};
    auto d0 = box_dimension(one, scales);
    REQUIRE(d0.has_value());
    CHECK(*d0 == 0.0);
    CHECK(!box_dimension(PointCloud{}, scales).has_value());
}

TEST_CASE("component counting via the 2h link radius") {
    std::vector<Vec2> pts{{0, 0}, {0.05, 0}, {0.1, 0}, {1, 0}, {1.02, 0.02}};
    CHECK(count_components(pts, 0.06) == 2);
    CHECK(count_components(pts, 1.0) == 1);
    CHECK(count_components({}, 0.1) == 0);
    auto lbl = component_labels(pts, 0.06);
    CHECK(lbl[0] == lbl[1]);
    CHECK(lbl[0] != lbl[3]);
}

TEST_CASE("measure estimates per ambient dimension") {
    // n = 1: counting measure of the intersection points.
    PointCloud pc1{{{0, 0}, {0.5, 0}, {0.9, 0.4}}, 1, CloudKind::Planar};
    CHECK(measure_estimate(pc1, 0.01) == doctest::Approx(3.0));

    // n = 2: sum of per-component MST lengths; a 4-point unit square path.
    PointCloud pc2{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 2, CloudKind::Planar};
    CHECK(measure_estimate(pc2, 3.0) == doctest::Approx(3.0).epsilon(1e-12));

    // Axisym radii: latitude spheres, C_{n-1} r^{n-1} with C_1 = 2 pi.
    PointCloud ax{{{2, 0}, {3, 0}}, 2, CloudKind::AxisymRadii};
    CHECK(measure_estimate(ax, 0.01) == doctest::Approx(2 * M_PI * 5).epsilon(1e-12));
}

TEST_CASE("sample invariants and CSV row shape") {
    IntersectionSample s;
    s.t = 0.25;
    CHECK(sample_invariants_ok(s));  // empty: 0 components, 0 measure
    s.points.points.push_back({1, 2});
    s.points.ambient_n = 1;
    CHECK(!sample_invariants_ok(s));  // nonempty but 0 components
    s.component_count = 1;
    s.measure_est = 1.0;
    CHECK(sample_invariants_ok(s));

    std::ostringstream os;
    write_sample_csv_row(os, s);
    CHECK(os.str() == "0.25,1,1,,1,2\n");
}

TEST_CASE("dimension probe scales are the dyadic ladder") {
    auto sc = dyadic_scales(0.16, 4);
    REQUIRE(sc.size() == 4);
    CHECK(sc[0] == doctest::Approx(0.16));
    CHECK(sc[3] == doctest::Approx(0.02));
}
