#include <cmath>

#include "doctest.h"
#include "mcflab/levelset.hpp"

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

// Exact SDF of a circle, bypassing rasterization error.
ScalarField2D circle_sdf(int N, double extent, double r) {
    const double h = 2.0 * extent / (N - 1);
    auto f = make_field(N, N, h, {-extent, -extent});
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) f.at(i, j) = norm(f.pos(i, j)) - r;
    return f;
}

double zero_set_mean_radius(const LevelSetState& st) {
    double s = 0.0;
    int n = 0;
    for (const auto& c : zero_set(st))
        for (auto v : c.vertices) {
            s += norm(v);
            ++n;
        }
    return n ? s / n : 0.0;
}

}  // namespace

TEST_CASE("rasterized signed distance: signs, values, even-odd nesting") {
    const int N = 97;
    const double h = 2.0 / (N - 1);
    auto phi = rasterize_signed_distance({circle({0, 0}, 0.6, 256)}, N, N, h, {-1, -1});
    CHECK(phi.at(N / 2, N / 2) == doctest::Approx(-0.6).epsilon(0.05));
    CHECK(phi.at(0, 0) > 0.0);
    CHECK(phi.at(0, 0) == doctest::Approx(std::sqrt(2.0) - 0.6).epsilon(0.05));

    auto ann = rasterize_signed_distance(
        {circle({0, 0}, 0.3, 128), circle({0, 0}, 0.6, 256)}, N, N, h, {-1, -1});
    CHECK(ann.at(N / 2, N / 2) == doctest::Approx(0.3).epsilon(0.1));  // inside both: outside
    const int i45 = N / 2 + static_cast<int>(0.45 / h);
    CHECK(ann.at(i45, N / 2) < 0.0);  // the annulus ring itself
}

TEST_CASE("reinitialize restores |grad| = 1 without moving the zero set") {
    LevelSetState st;
    st.phi = circle_sdf(129, 1.0, 0.55);
    for (double& v : st.phi.values) v *= 3.0;  // break the SDF property
    auto before = zero_set(st);
    reinitialize(st);
    auto after = zero_set(st);

    const double h = st.phi.h;
    // Hausdorff between zero sets stays under h/2.
    double worst = 0.0;
    for (const auto& ca : after)
        for (auto v : ca.vertices) {
            double best = 1e300;
            for (const auto& cb : before)
                for (auto w : cb.vertices) best = std::min(best, dist(v, w));
            worst = std::max(worst, best);
        }
    CHECK(worst < 0.5 * h);

    // Unit gradient in the band around the interface.
    for (int j = 1; j + 1 < st.phi.ny; ++j)
        for (int i = 1; i + 1 < st.phi.nx; ++i) {
            if (std::abs(st.phi.at(i, j)) > 0.3) continue;
            const double gx = (st.phi.at(i + 1, j) - st.phi.at(i - 1, j)) / (2 * h);
            const double gy = (st.phi.at(i, j + 1) - st.phi.at(i, j - 1)) / (2 * h);
            const double g = std::hypot(gx, gy);
            CHECK(g > 0.8);
            CHECK(g < 1.2);
        }
}

TEST_CASE("planar level-set circle obeys r^2 = r0^2 - 2t") {
    LevelSetState st;
    st.phi = circle_sdf(129, 1.0, 0.6);
    const double h = st.phi.h;
    while (st.t < 0.1) evolve_levelset(st, std::min(levelset_dt(st), 0.1 - st.t));
    const double r = zero_set_mean_radius(st);
    CHECK(std::abs(r * r - (0.36 - 2 * st.t)) < 10 * h);
}

TEST_CASE("axisym level-set sphere obeys r^2 = r0^2 - 2nt") {
    LevelSetState st;
    st.phi = circle_sdf(129, 1.0, 0.6);
    st.mode = LsMode::Axisym;
    st.n = 2;
    st.axis = Axis::Y;
    const double h = st.phi.h;
    while (st.t < 0.05) evolve_levelset(st, std::min(levelset_dt(st), 0.05 - st.t));
    const double r = zero_set_mean_radius(st);
    CHECK(std::abs(r * r - (0.36 - 4 * st.t)) < 10 * h);
    for (double v : st.phi.values) CHECK(std::isfinite(v));
}

TEST_CASE("level-set CFL guard") {
    LevelSetState st;
    st.phi = circle_sdf(65, 1.0, 0.5);
    CHECK_THROWS_WITH_AS(evolve_levelset(st, 1.0), doctest::Contains("cfl-violation"),
                         SimError);
}

TEST_CASE("sublevel area is exact for the linear interpolant") {
    auto f = circle_sdf(129, 1.0, 0.5);
    CHECK(sublevel_area(f, 0.0) == doctest::Approx(M_PI * 0.25).epsilon(2e-3));
    // Steiner shift: {phi < c} for an SDF is the disc of radius r + c.
    CHECK(sublevel_area(f, 0.1) == doctest::Approx(M_PI * 0.36).epsilon(2e-3));
    CHECK(sublevel_area(f, -0.1) == doctest::Approx(M_PI * 0.16).epsilon(2e-3));
    // Whole-domain sublevel saturates at the domain area.
    CHECK(sublevel_area(f, 10.0) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("smooth interfaces report zero fat volume and tight tracks") {
    LevelSetState st;
    st.phi = circle_sdf(129, 1.0, 0.55);
    auto rep = fattening_report(st);
    CHECK(rep.fat_volume <= rep.fat_threshold);
    CHECK(rep.fat_threshold == doctest::Approx(10 * st.phi.h * st.phi.h));
    CHECK(!rep.fattening_now);

    auto tr = track_inner_outer(st);
    CHECK(tr.discrepancy < 2 * st.phi.h);
    CHECK(!tr.outer.empty());
    CHECK(!tr.inner.empty());

    // Still true after evolving a while (the non-fattening branch).
    while (st.t < 0.03) evolve_levelset(st, levelset_dt(st));
    auto rep2 = fattening_report(st);
    CHECK(rep2.fat_volume <= rep2.fat_threshold);
}

TEST_CASE("cone scenario: point section fattens into an expanding circle") {
    CHECK_THROWS_WITH_AS(cone_intersection_scenario(95.0, 0.0, 0.01, 0.005, 64),
                         doctest::Contains("invalid-params"), SimError);

    auto cs = cone_intersection_scenario(75.0, 0.0, 0.03, 0.005, 96);
    REQUIRE(cs.samples.size() >= 5);
    const auto& s0 = cs.samples.front();
    CHECK(s0.t == 0.0);
    CHECK(s0.cloud.component_count == 1);
    CHECK(s0.cloud.measure_est == 0.0);
    REQUIRE(s0.cloud.dim_est.has_value());
    CHECK(*s0.cloud.dim_est == 0.0);

    CHECK(cs.fattening);
    CHECK(!cs.monotone_dim);
    const auto& last = cs.samples.back();
    CHECK(last.cloud.measure_est > 0.0);
    REQUIRE(!last.radii.empty());
    // Self-similar spread: r/sqrt(t) constant within 10% over the later samples.
    std::vector<double> ratios;
    for (const auto& s : cs.samples)
        if (s.t >= 0.015 && !s.radii.empty()) ratios.push_back(s.radii.back() / std::sqrt(s.t));
    REQUIRE(ratios.size() >= 2);
    for (double r : ratios) {
        CHECK(r >= ratios.front() * 0.9);
        CHECK(r <= ratios.front() * 1.1);
    }
    // Fat volume grows across consecutive samples once fattening starts.
    int grow = 0, best = 0;
    for (size_t i = 1; i < cs.samples.size(); ++i) {
        grow = cs.samples[i].fat_volume > cs.samples[i - 1].fat_volume ? grow + 1 : 0;
        best = std::max(best, grow);
    }
    CHECK(best >= 3);
}

TEST_CASE("dimension series tolerance and flagging") {
    auto mk = [](double t, std::optional<double> d) {
        IntersectionSample s;
        s.t = t;
        if (d) {
            s.points.points = {{0, 0}};
            s.component_count = 1;
            s.dim_est = d;
        }
        return s;
    };
    std::vector<IntersectionSample> ok{mk(0, 1.0), mk(1, 0.9), mk(2, std::nullopt),
                                       mk(3, 1.05)};
    auto v1 = evaluate_dim_series(ok);
    CHECK(v1.monotone);
    CHECK(v1.flagged.empty());

    std::vector<IntersectionSample> bad{mk(0, 1.0), mk(1, 0.9), mk(2, 1.25)};
    auto v2 = evaluate_dim_series(bad);
    CHECK(!v2.monotone);
    REQUIRE(!v2.flagged.empty());
    CHECK(v2.flagged.front() == 2);
}

TEST_CASE("localizability: disjoint circles restrict cleanly") {
    const int N = 97;
    const double h = 2.2 / (N - 1);
    LevelSetState st;
    st.phi = rasterize_signed_distance(
        {circle({-0.55, 0}, 0.3, 128), circle({+0.55, 0}, 0.3, 128)}, N, N, h,
        {-1.1, -1.1});
    MaskSpec K;
    K.is_disk = false;
    K.normal = {1, 0};
    K.offset = 0.0;
    auto res = localizability_check(st, K, 0.008, 0.002);
    CHECK(res.pass);
    CHECK(res.flagged.empty());
    REQUIRE(!res.samples.empty());
    for (const auto& s : res.samples) {
        CHECK(s.union_gap <= 2 * h);
        CHECK(s.piece_gap > 2 * h);
    }

    MaskSpec D;  // disk mask enclosing only the right circle's neighborhood
    D.is_disk = true;
    D.center = {0.55, 0};
    D.radius = 0.55;
    auto res2 = localizability_check(st, D, 0.008, 0.002);
    CHECK(res2.pass);
}
