#pragma once

// Graphical mean curvature flow on rectangles (n = 1 or 2), assembly of the
// parabolic coefficients of the difference equation satisfied by w = v - u,
// and nodal-set tracking of w.
//
// The difference of two graphical flows solves
//     w_t = d_i(a^ij d_j w) + b^j d_j w
// with a^ij the theta-average of dF/dP_ij(Hess w_theta, grad w_theta) along
// the segment w_theta = theta*v + (1-theta)*u, where F(P, q) = tr P -
// (q^T P q)/(1+|q|^2) is the graphical MCF operator. With positive quadrature
// weights the eigenvalues of a lie in [(1+C)^-1, 1], C = max |grad w_theta|^2.

#include <optional>
#include <vector>

#include "mcflab/csf.hpp"
#include "mcflab/geometry.hpp"

namespace mcflab {

inline constexpr double kGradCap = 10.0;

struct GraphPair {
    ScalarField2D u, v;
    double t = 0.0;
    int n() const { return u.ny == 1 ? 1 : 2; }
};

// Grids must coincide; enforced by the pair operations.
bool pair_grids_match(const GraphPair& pair);

// One explicit Euler step of u_t = Laplace u - Hess u(grad u, grad u)/(1+|grad u|^2)
// with central differences; boundary nodes are left untouched (Dirichlet).
// Requires dt <= 0.2 h^2 ("cfl-violation") and max |grad u| <= 10
// ("gradient-blowup").
void step_graphical(ScalarField2D& field, double dt);

struct DiffCoefficients {
    int nx = 0, ny = 0, n = 1;
    double h = 0.0;
    Vec2 origin;
    double t = 0.0;
    double c_bound = 0.0;  // max |grad w_theta|^2 over nodes and quadrature
    // Row-major nx*ny grids; a valid at margin >= 1, b at margin >= 2.
    std::vector<double> a11, a12, a22, b1, b2;
    static constexpr int margin_a = 1;
    static constexpr int margin_b = 2;
};

DiffCoefficients assemble_coefficients(const GraphPair& pair);

struct HypothesisReport {
    bool ellipticity_ok = false;
    double eig_min = 0.0, eig_max = 0.0;
    double lipschitz_est = 0.0;  // max |a(x,t)-a(y,s)| / sqrt(|x-y|^2+|t-s|), |x-y| <= 4h
    double b_sup = 0.0;
    double c_bound = 0.0;
};

// Needs at least 3 time slices.
HypothesisReport verify_coefficient_hypotheses(const std::vector<DiffCoefficients>& history);

struct NodalSeries {
    MonitorSeries mon;                 // per-sample zero sets of w (shielded interior)
    std::vector<double> lambda;        // windowed L^2 ratio per sample
    std::vector<DiffCoefficients> coeff_history;
    std::optional<HypothesisReport> hypothesis;
};

// Evolve both graphs with frozen Dirichlet data, sampling the w = 0 locus on
// the middle half of the domain every sample_dt. Measure proxy: point count
// (n=1) or contour length (n=2). Lambda uses the window (t - min(4,t), t] by
// trapezoid over samples, seeded with den*sample_dt when the window holds a
// single sample so it stays positive for w != 0; windows are not clipped at
// t-4 (every shipped horizon is far below 4). Exact coincidence u == v at a
// sample raises "flows-coincide".
NodalSeries evolve_pair_and_track_nodal(GraphPair pair, double T, double sample_dt,
                                        int coeff_slices = 5);

struct OneSidedVerdict {
    bool sign_change = false;
    double nodal_measure_est = 0.0;
    bool positivity_ok = true;  // sign_change implies measure > h
};

OneSidedVerdict one_sided_test(const ScalarField2D& w);

// Diagnostic for the divergence-form residual: steps a copy of the pair once
// by dt and returns max over the shielded interior (margin 3 nodes, middle
// half) of |w_t - d_i(a^ij d_j w) - b^j d_j w| with coefficients assembled at
// the pre-step state. Second order in h for smooth data.
double divergence_form_residual(const GraphPair& pair, double dt);

}  // namespace mcflab
