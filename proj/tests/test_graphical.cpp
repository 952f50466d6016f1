#include <cmath>

#include "doctest.h"
#include "mcflab/graphical.hpp"

using namespace mcflab;

namespace {

ScalarField2D grid2(int N, double (*f)(double, double)) {
    const double h = 1.0 / (N - 1);
    auto g = make_field(N, N, h, {0, 0});
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) g.at(i, j) = f(i * h, j * h);
    return g;
}

double bump(double x, double y) { return 0.25 * std::sin(M_PI * x) * std::sin(M_PI * y); }
double bump_tilt(double x, double y) { return bump(x, y) + 0.15 * (x + y - 1.0); }
// Different amplitude too, so w = v - u is genuinely nonlinear (a linear w
// annihilates every second-derivative commutator and the residual sits at the
// roundoff floor).
double bump_big(double x, double y) {
    return 0.30 * std::sin(M_PI * x) * std::sin(M_PI * y) + 0.15 * (x + y - 1.0);
}

GraphPair tilt_pair(int N) { return {grid2(N, bump), grid2(N, bump_tilt), 0.0}; }
GraphPair curved_pair(int N) { return {grid2(N, bump), grid2(N, bump_big), 0.0}; }

}  // namespace

TEST_CASE("theta-averaged a11 equals pi/4 for opposite unit slopes") {
    // u = x, v = -x: w_theta has slope 1-2theta, so
    // a11 = int_0^1 dtheta / (1 + (1-2theta)^2) = pi/4 exactly.
    const int N = 33;
    const double h = 1.0 / (N - 1);
    GraphPair pair;
    pair.u = make_field(N, 1, h, {0, 0});
    pair.v = make_field(N, 1, h, {0, 0});
    for (int i = 0; i < N; ++i) {
        pair.u.at(i, 0) = i * h;
        pair.v.at(i, 0) = -(i * h);
    }
    const auto co = assemble_coefficients(pair);
    REQUIRE(co.n == 1);
    for (int i = co.margin_a; i < co.nx - co.margin_a; ++i)
        CHECK(std::abs(co.a11[i] - M_PI / 4) < 1e-10);
    // c_bound samples |grad w_theta|^2 at the quadrature nodes, so it sits just
    // below the endpoint value 1.
    CHECK(co.c_bound > 0.9);
    CHECK(co.c_bound <= 1.0);
}

TEST_CASE("coefficient eigenvalues stay inside the ellipticity bracket") {
    const auto pair = tilt_pair(49);
    const auto co = assemble_coefficients(pair);
    const double lo = 1.0 / (1.0 + co.c_bound) - 1e-9;
    for (int j = co.margin_a; j < co.ny - co.margin_a; ++j)
        for (int i = co.margin_a; i < co.nx - co.margin_a; ++i) {
            const size_t k = static_cast<size_t>(j) * co.nx + i;
            const double tr2 = 0.5 * (co.a11[k] + co.a22[k]);
            const double disc = std::sqrt(0.25 * (co.a11[k] - co.a22[k]) * (co.a11[k] - co.a22[k]) +
                                          co.a12[k] * co.a12[k]);
            CHECK(tr2 - disc >= lo);
            CHECK(tr2 + disc <= 1.0 + 1e-9);
        }
}

TEST_CASE("divergence-form residual converges at second order") {
    const double dt = 1e-6;
    std::vector<double> res;
    for (int N : {33, 65, 129}) res.push_back(divergence_form_residual(curved_pair(N), dt));
    for (size_t k = 1; k < res.size(); ++k) CHECK(std::log2(res[k - 1] / res[k]) >= 1.8);
}

TEST_CASE("explicit step guards CFL and gradient bounds") {
    auto u = grid2(33, bump);
    CHECK_THROWS_WITH_AS(step_graphical(u, 1.0), doctest::Contains("cfl-violation"), SimError);

    auto steep = grid2(33, [](double x, double) { return 20.0 * x; });
    CHECK_THROWS_WITH_AS(step_graphical(steep, 1e-5), doctest::Contains("gradient-blowup"),
                         SimError);
}

TEST_CASE("small-amplitude graph decays at the heat rate") {
    // u = eps sin(pi x) sin(pi y) is an eigenfunction of the linearization with
    // rate 2 pi^2; the quadratic term is O(eps^3).
    const int N = 65;
    auto u = grid2(N, [](double x, double y) { return 0.01 * std::sin(M_PI * x) * std::sin(M_PI * y); });
    const double h = 1.0 / (N - 1), dt = 0.15 * h * h, T = 0.02;
    double t = 0.0;
    while (t < T) {
        step_graphical(u, dt);
        t += dt;
    }
    const double mid = u.at(N / 2, N / 2);
    CHECK(mid / 0.01 == doctest::Approx(std::exp(-2 * M_PI * M_PI * t)).epsilon(0.02));
}

TEST_CASE("nodal tracker rejects coincident flows") {
    GraphPair pair;
    pair.u = grid2(17, bump);
    pair.v = pair.u;
    CHECK_THROWS_WITH_AS(evolve_pair_and_track_nodal(pair, 0.001, 0.0005),
                         doctest::Contains("flows-coincide"), SimError);
}

TEST_CASE("tilted pair: nodal diagonal, positive lambda, verified hypotheses") {
    auto ns = evolve_pair_and_track_nodal(tilt_pair(65), 0.02, 0.002);
    REQUIRE(!ns.mon.samples.empty());
    // w(0) = 0.15(x+y-1); its zero set crosses the middle half diagonally with
    // length sqrt(2)/2.
    CHECK(ns.mon.samples.front().measure_est ==
          doctest::Approx(std::sqrt(2.0) / 2).epsilon(0.03));
    CHECK(ns.mon.monotone_count);
    REQUIRE(ns.lambda.size() == ns.mon.samples.size());
    for (double l : ns.lambda) CHECK(l > 0.0);
    REQUIRE(ns.hypothesis.has_value());
    CHECK(ns.hypothesis->ellipticity_ok);
    CHECK(ns.hypothesis->eig_min >= 1.0 / (1.0 + ns.hypothesis->c_bound) - 1e-9);
    CHECK(ns.hypothesis->eig_max <= 1.0 + 1e-9);
    CHECK(ns.hypothesis->lipschitz_est < 50.0);
    CHECK(ns.hypothesis->b_sup < kGradCap);
}

TEST_CASE("one-sided test: sign changes force a fat nodal set") {
    auto pos = grid2(33, [](double x, double y) { return 1.0 + 0.1 * x * y; });
    auto vp = one_sided_test(pos);
    CHECK(!vp.sign_change);
    CHECK(vp.positivity_ok);

    auto line = grid2(33, [](double x, double) { return x - 0.31; });
    auto vl = one_sided_test(line);
    CHECK(vl.sign_change);
    CHECK(vl.nodal_measure_est > line.h);
    CHECK(vl.positivity_ok);

    // A shallow one-node dip is exactly the near-tangential touching the
    // detector exists to flag: sign change, but a nodal set far below h.
    auto dip = grid2(33, [](double, double) { return 1.0; });
    dip.at(16, 16) = -1e-3;
    auto vd = one_sided_test(dip);
    CHECK(vd.sign_change);
    CHECK(vd.nodal_measure_est < dip.h);
    CHECK(!vd.positivity_ok);

    // A deep dip opens a diamond of perimeter 2 sqrt(2) h > h and passes.
    auto deep = grid2(33, [](double, double) { return 1.0; });
    deep.at(16, 16) = -1.0;
    auto vdd = one_sided_test(deep);
    CHECK(vdd.sign_change);
    CHECK(vdd.positivity_ok);
}
