#include <cmath>

#include "doctest.h"
#include "mcflab/csf.hpp"

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

double mean_radius(const Polyline& p, Vec2 c) {
    double s = 0.0;
    for (auto v : p.vertices) s += dist(v, c);
    return s / p.size();
}

Polyline figure_eight(int nv) {
    Polyline p;
    p.closed = true;
    for (int i = 0; i < nv; ++i) {
        const double th = 2.0 * M_PI * i / nv;
        p.vertices.push_back({0.7 * std::sin(th), 0.7 * std::sin(th) * std::cos(th)});
    }
    return p;
}

}  // namespace

TEST_CASE("circle obeys r^2 = r0^2 - 2t under the flow") {
    const double h = 0.02;
    auto st = CsfState::from_curve(circle({0, 0}, 1.0, 314), h);
    const std::vector<double> checkpoints{0.1, 0.25, 0.4};
    size_t next = 0;
    while (st.alive && next < checkpoints.size()) {
        const double dt = std::min(stable_dt(st), checkpoints[next] - st.t);
        step_csf(st, dt);
        if (st.t >= checkpoints[next] - 1e-12) {
            const double r = mean_radius(st.curve, {0, 0});
            CHECK(std::abs(r * r - (1.0 - 2.0 * st.t)) < 10 * h);
            ++next;
        }
    }
    CHECK(next == checkpoints.size());
}

TEST_CASE("tiny embedded loops retire by the enclosed-area rule") {
    const double h = 0.05;
    auto st = CsfState::from_curve(circle({0, 0}, 0.4, 64), h);
    // t_ext = 0.08; run past it and confirm the state dies instead of blowing up.
    while (st.alive && st.t < 0.2) step_csf(st, stable_dt(st));
    CHECK(!st.alive);
    CHECK(st.t < 0.09);
}

TEST_CASE("CFL guard rejects oversized steps") {
    auto st = CsfState::from_curve(circle({0, 0}, 1.0, 128), 0.05);
    CHECK_THROWS_WITH_AS(step_csf(st, 1.0), doctest::Contains("cfl-violation"), SimError);
}

TEST_CASE("disjoint circles never collide (avoidance)") {
    const double h = 0.03;
    auto a = CsfState::from_curve(circle({-1.0, 0}, 0.6, 128), h);
    auto b = CsfState::from_curve(circle({+1.0, 0}, 0.6, 128), h);
    double prev_gap = 2.0 - 1.2;
    while (a.alive && b.alive && a.t < 0.15) {
        const double dt = std::min(stable_dt(a), stable_dt(b));
        step_csf(a, dt);
        step_csf(b, dt);
        double gap = 1e9;
        for (auto p : a.curve.vertices)
            for (auto q : b.curve.vertices) gap = std::min(gap, dist(p, q));
        // Disjoint convex curves strictly separate; allow resampling jitter.
        CHECK(gap > prev_gap - 2 * h * h);
        prev_gap = gap;
    }
    CHECK(a.t >= 0.15);
}

TEST_CASE("pair monitor rejects identical inputs") {
    auto a = CsfState::from_curve(circle({0, 0}, 1.0, 64), 0.1);
    CHECK_THROWS_WITH_AS(run_pair_monitor(a, a, 0.01, 0.005),
                         doctest::Contains("identical-inputs"), SimError);
}

TEST_CASE("two-circle separation time matches the heat-clock value 3/8") {
    // Unit circles centered (+-1/2, 0) intersect until r(t)^2 = 1 - 2t drops
    // below 1/4, i.e. t0 = 3/8.
    const double h = 0.02, sample_dt = 0.005;
    auto a = CsfState::from_curve(circle({-0.5, 0}, 1.0, 314), h);
    auto b = CsfState::from_curve(circle({+0.5, 0}, 1.0, 314), h);
    auto ms = run_pair_monitor(a, b, 0.42, sample_dt);
    CHECK(ms.monotone_count);
    REQUIRE(ms.t0_detected.has_value());
    CHECK(std::abs(*ms.t0_detected - 0.375) <= 0.02);
    // Counts: 2 crossings while overlapping, then 0.
    CHECK(ms.samples.front().component_count == 2);
    CHECK(ms.samples.back().component_count == 0);
}

TEST_CASE("count forgiveness tolerates single-sample blips only") {
    MonitorSeries ms;
    auto push = [&](int c) {
        IntersectionSample s;
        s.t = ms.samples.size() * 0.1;
        s.component_count = c;
        if (c > 0) {
            s.points.points.assign(c, Vec2{0, 0});
            s.measure_est = c;
        }
        ms.samples.push_back(s);
    };
    for (int c : {2, 2, 3, 2, 1, 0}) push(c);
    evaluate_count_series(ms);
    CHECK(ms.monotone_count);
    CHECK(ms.flagged.empty());
    bool noted = false;
    for (const auto& n : ms.notes) noted |= n.tag == "transient-increase";
    CHECK(noted);

    ms = MonitorSeries{};
    for (int c : {2, 3, 3, 1}) push(c);
    evaluate_count_series(ms);
    CHECK(!ms.monotone_count);
    REQUIRE(!ms.flagged.empty());
    CHECK(ms.flagged.front() == 1);
}

TEST_CASE("figure-eight self-crossings never increase") {
    auto st = CsfState::from_curve(figure_eight(400), 0.02);
    auto ms = run_self_monitor(st, 0.12, 0.005);
    CHECK(ms.monotone_count);
    CHECK(ms.samples.front().component_count == 1);
    int prev = ms.samples.front().component_count;
    for (const auto& s : ms.samples) {
        CHECK(s.component_count <= prev);
        prev = s.component_count;
    }
    CHECK(ms.samples.back().component_count <= 1);
}

TEST_CASE("monitor samples satisfy the shared invariants") {
    const double h = 0.03;
    auto a = CsfState::from_curve(circle({-0.4, 0}, 0.7, 160), h);
    auto b = CsfState::from_curve(circle({+0.4, 0}, 0.7, 160), h);
    auto ms = run_pair_monitor(a, b, 0.1, 0.01);
    REQUIRE(!ms.samples.empty());
    CHECK(ms.samples.front().t == 0.0);
    for (const auto& s : ms.samples) {
        CHECK(sample_invariants_ok(s));
        CHECK(s.points.ambient_n == 1);
    }
}

TEST_CASE("make_planar_sample wires components, measure, and dim") {
    auto s = make_planar_sample(0.5, {{0, 0}, {0.001, 0}, {1, 1}}, 0.01, 1);
    CHECK(s.t == 0.5);
    CHECK(s.component_count == 2);           // link radius 2h merges the near pair
    CHECK(s.measure_est == doctest::Approx(3.0));  // H^0 counts points
    CHECK(sample_invariants_ok(s));
}
