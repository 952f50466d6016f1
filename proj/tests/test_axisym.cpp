#include <cmath>

#include "doctest.h"
#include "mcflab/axisym.hpp"

using namespace mcflab;

namespace {

// Upper semicircle about the x-axis: profile of the n-sphere of radius r0.
AxisymState sphere_profile(double r0, int n, double h) {
    Polyline p;
    p.closed = false;
    const int nv = std::max(32, static_cast<int>(std::lround(M_PI * r0 / h)));
    for (int i = 0; i <= nv; ++i) {
        const double a = M_PI * i / nv;
        p.vertices.push_back({r0 * std::cos(a), r0 * std::sin(a)});
    }
    AxisymState st;
    st.profile = std::move(p);
    st.n = n;
    st.axis = Axis::X;
    st.h_target = h;
    return st;
}

double mean_radius(const AxisymState& st) {
    double s = 0.0;
    for (auto v : st.profile.vertices) s += norm(v);
    return s / st.profile.size();
}

}  // namespace

TEST_CASE("sphere profiles follow r^2 = r0^2 - 2nt") {
    for (int n : {2, 3}) {
        const double h = 1.0 / 128;
        auto st = sphere_profile(1.0, n, h);
        const double t_target = 0.8 / (2.0 * n);  // 80% of extinction
        while (st.alive && st.t < t_target) {
            const double dt = std::min(stable_dt_axisym(st), t_target - st.t);
            step_axisym(st, dt);
        }
        REQUIRE(st.alive);
        const double r = mean_radius(st);
        CHECK(std::abs(r * r - (1.0 - 2.0 * n * st.t)) < 10 * h);
    }
}

TEST_CASE("pole mean curvature is n/r on a sphere") {
    auto st = sphere_profile(0.5, 2, 0.01);
    auto H = mean_curvature(st);
    // Poles (endpoints on the axis) and equator alike: H = n / r.
    CHECK(H.front() == doctest::Approx(2.0 / 0.5).epsilon(1e-6));
    CHECK(H.back() == doctest::Approx(2.0 / 0.5).epsilon(1e-6));
    CHECK(H[H.size() / 2] == doctest::Approx(2.0 / 0.5).epsilon(1e-4));
}

TEST_CASE("ring profile satisfies its construction audits") {
    const double h = 0.004;
    auto ring = marriage_ring_profile(2, h);
    REQUIRE(ring.profile.closed);
    CHECK(ring.profile.size() % 2 == 0);
    CHECK(ring.reflection_symmetric);

    const auto& vs = ring.profile.vertices;
    // Inner crossing at r = 10n = 20, width 1, mirror symmetric across y = 0.
    CHECK(vs[0].y == 0.0);
    CHECK(vs[0].x == doctest::Approx(20.0).epsilon(1e-3));
    const Vec2 outer = vs[vs.size() / 2];
    CHECK(outer.y == 0.0);
    CHECK(outer.x == doctest::Approx(21.0).epsilon(1e-3));
    for (size_t i = 1; i < vs.size() / 2; ++i) {
        const Vec2 a = vs[i], b = vs[vs.size() - i];
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-9));
        CHECK(a.y == doctest::Approx(-b.y).epsilon(1e-9));
    }

    // Discrete meridian curvature: 10 at the inner crossing, 1/10 at the outer,
    // >= 1/5 well inside the inner half, extremes at/next to the crossings.
    auto kd = curvature(ring.profile);
    const size_t m = kd.size(), half = m / 2;
    CHECK(kd[0] == doctest::Approx(10.0).epsilon(0.01));
    CHECK(kd[half] == doctest::Approx(0.1).epsilon(0.1));
    size_t imax = 0, imin = 0;
    for (size_t i = 0; i < m; ++i) {
        CHECK(kd[i] > 0.0);  // strictly convex meridian
        if (kd[i] > kd[imax]) imax = i;
        if (kd[i] < kd[imin]) imin = i;
        if (std::abs(vs[i].x - 20.0) < 0.3) CHECK(kd[i] >= 0.2 - 1e-6);
    }
    CHECK(std::min(imax, m - imax) <= 2);
    CHECK((imin >= half - 2 && imin <= half + 2));
}

TEST_CASE("ring section measure grows at the prescribed initial rate") {
    // d/dt [C_1 (r_min + r_max)] at t=0 equals 2 pi (10 - 1/20 - (1/10 + 1/21))
    // = 2 pi * 9.802...: the inner sphere expands (H < 0 there) faster than the
    // outer shrinks.
    const double h = 0.004;
    auto ring = marriage_ring_profile(2, h);
    const double sample_dt = 1e-4;
    auto rs = ring_intersection_series(ring, 10 * sample_dt, sample_dt);
    REQUIRE(rs.samples.size() >= 3);
    CHECK(!rs.topology_change);

    const double m0 = rs.samples[0].measure;
    CHECK(m0 == doctest::Approx(2 * M_PI * 41.0).epsilon(1e-3));
    for (size_t i = 1; i < rs.samples.size(); ++i)
        CHECK(rs.samples[i].measure > rs.samples[i - 1].measure);

    const double rate = (rs.samples[1].measure - m0) / sample_dt;
    const double target = 2 * M_PI * (10.0 - 1.0 / 20 - (0.1 + 1.0 / 21));
    CHECK(std::abs(rate - target) <= 0.10 * target);
}

TEST_CASE("dumbbell profile validation and containment") {
    CHECK_THROWS_WITH_AS(dumbbell_profile(0.5, 0.2, 0.01),
                         doctest::Contains("invalid-curve"), SimError);

    const double L = 0.4, eps = 0.03, h = 0.01;
    auto db = dumbbell_profile(L, eps, h);
    REQUIRE(!db.profile.closed);
    CHECK(db.axis == Axis::X);
    // Even profile: endpoints on the axis, radii symmetric in x.
    CHECK(db.profile.vertices.front().y == doctest::Approx(0.0));
    CHECK(db.profile.vertices.back().y == doctest::Approx(0.0));
    // Neck radius at x = 0.
    double neck = 1e9;
    for (auto v : db.profile.vertices)
        if (std::abs(v.x) < L / 2) neck = std::min(neck, v.y);
    CHECK(neck == doctest::Approx(eps).epsilon(0.05));
    // Bells clear the inscribed spheres at t = 0.
    for (auto v : db.profile.vertices) {
        const double d = std::min(dist(v, {+4 * L, 0.0}), dist(v, {-4 * L, 0.0}));
        CHECK(d >= L - 1e-9);
    }
}

TEST_CASE("dumbbell pinches, splits the section, and keeps the spheres inside") {
    // Section plane slightly below the initial neck height: the shrinking neck
    // drops under it well before the pinch, so the component count rises while
    // the series is still running.
    const double L = 0.4, eps = 0.03, h = 0.008;
    auto db = dumbbell_profile(L, eps, h);
    const double plane_z = std::sqrt(0.6) * eps;
    auto ds = dumbbell_component_series(db, L, plane_z, 6e-4, 4e-5);
    CHECK(ds.pinched);
    CHECK(ds.transition_detected);
    CHECK(ds.spheres_enclosed);
    REQUIRE(!ds.samples.empty());
    CHECK(ds.samples.front().components == 1);
    bool split = false;
    for (const auto& s : ds.samples) {
        split = split || s.components >= 2;
        CHECK(s.min_sphere_clearance >= -3 * h);
    }
    CHECK(split);
}

TEST_CASE("axisym section sample measures latitude spheres exactly") {
    auto s = axisym_section_sample(0.1, {0.5, 0.8}, 0.01, 2);
    CHECK(s.t == 0.1);
    CHECK(s.component_count == 2);
    CHECK(s.measure_est == doctest::Approx(2 * M_PI * 1.3).epsilon(1e-9));
    REQUIRE(s.dim_est.has_value());
    CHECK(*s.dim_est == doctest::Approx(1.0).epsilon(0.15));
    CHECK(s.points.kind == CloudKind::AxisymRadii);
    CHECK(sample_invariants_ok(s));

    // A cone vertex: one point of zero radius has measure 0 but dim defined.
    auto v = axisym_section_sample(0.0, {0.0}, 0.01, 2);
    CHECK(v.component_count == 1);
    CHECK(v.measure_est == 0.0);
    REQUIRE(v.dim_est.has_value());
    CHECK(*v.dim_est == 0.0);
    CHECK(sample_invariants_ok(v));
}

TEST_CASE("thin necks raise axis-collision instead of inverting") {
    const double L = 0.4, eps = 0.03, h = 0.008;
    auto db = dumbbell_profile(L, eps, h);
    bool collided = false;
    try {
        while (db.alive && db.t < 0.01) step_axisym(db, stable_dt_axisym(db));
    } catch (const SimError& e) {
        collided = e.code() == "axis-collision";
    }
    CHECK(collided);
}

TEST_CASE("compact dumbbell outline matches its parametric arc") {
    const double R = 0.35, c = 0.55, w = 0.08, h = 0.01;
    auto outline = compact_dumbbell_outline(R, c, w, h);
    REQUIRE(outline.closed);
    CHECK(std::abs(signed_area(outline)) > 2 * (M_PI * R * R) * 0.8);
    // Even in y.
    double ymax = 0, ymin = 0;
    for (auto v : outline.vertices) {
        ymax = std::max(ymax, v.y);
        ymin = std::min(ymin, v.y);
    }
    CHECK(ymax == doctest::Approx(-ymin).epsilon(1e-6));
    CHECK(ymax == doctest::Approx(R).epsilon(0.05));

    auto arc = compact_dumbbell_arc(R, c, w, h);
    REQUIRE(!arc.profile.closed);
    CHECK(arc.profile.vertices.front().y == doctest::Approx(0.0));
    CHECK(arc.profile.vertices.back().y == doctest::Approx(0.0));
    CHECK(polyline_length(arc.profile) == doctest::Approx(polyline_length(outline) / 2).epsilon(0.02));
}
