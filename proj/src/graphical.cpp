#include "mcflab/graphical.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mcflab/contour.hpp"

namespace mcflab {

namespace {

// 16-point Gauss-Legendre rule mapped to [0, 1].
struct Quadrature {
    std::array<double, 16> x{}, w{};
    Quadrature() {
        static const double xs[8] = {
            0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
            0.9445750230732326, 0.9894009349916499};
        static const double ws[8] = {
            0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
            0.0622535239386479, 0.0271524594117541};
        for (int i = 0; i < 8; ++i) {
            x[2 * i] = 0.5 * (1.0 - xs[i]);
            x[2 * i + 1] = 0.5 * (1.0 + xs[i]);
            w[2 * i] = 0.5 * ws[i];
            w[2 * i + 1] = 0.5 * ws[i];
        }
    }
};
const Quadrature kGL;

struct Stencil {
    double ux = 0, uy = 0, uxx = 0, uyy = 0, uxy = 0;
};

Stencil central(const ScalarField2D& f, int i, int j) {
    Stencil s;
    const double h = f.h, h2 = h * h;
    const bool two_d = f.ny > 1;
    s.ux = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
    s.uxx = (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / h2;
    if (two_d) {
        s.uy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
        s.uyy = (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / h2;
        s.uxy = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) +
                 f.at(i - 1, j - 1)) /
                (4.0 * h2);
    }
    return s;
}

double rhs_graphical(const Stencil& s, bool two_d) {
    const double g2 = s.ux * s.ux + s.uy * s.uy;
    if (!two_d) return s.uxx / (1.0 + g2);
    const double hess_q = s.ux * s.ux * s.uxx + 2.0 * s.ux * s.uy * s.uxy +
                          s.uy * s.uy * s.uyy;
    return s.uxx + s.uyy - hess_q / (1.0 + g2);
}

}  // namespace

bool pair_grids_match(const GraphPair& pair) {
    return pair.u.nx == pair.v.nx && pair.u.ny == pair.v.ny && pair.u.h == pair.v.h &&
           pair.u.origin.x == pair.v.origin.x && pair.u.origin.y == pair.v.origin.y;
}

void step_graphical(ScalarField2D& field, double dt) {
    if (!field.valid()) throw SimError("nan-field", "invalid scalar field");
    const double h = field.h;
    if (dt > 0.2 * h * h * (1.0 + 1e-12))
        throw SimError("cfl-violation",
                       "dt=" + format_double(dt) + " exceeds 0.2*h^2=" + format_double(0.2 * h * h));
    const bool two_d = field.ny > 1;
    const int jlo = two_d ? 1 : 0, jhi = two_d ? field.ny - 1 : 1;
    std::vector<double> next = field.values;
    for (int j = jlo; j < jhi; ++j) {
        for (int i = 1; i < field.nx - 1; ++i) {
            const Stencil s = central(field, i, j);
            const double grad = std::sqrt(s.ux * s.ux + s.uy * s.uy);
            if (grad > kGradCap)
                throw SimError("gradient-blowup",
                               "|grad u|=" + format_double(grad) + " exceeds cap at node " +
                                   std::to_string(i) + "," + std::to_string(j));
            const double val = field.at(i, j) + dt * rhs_graphical(s, two_d);
            if (!std::isfinite(val))
                throw SimError("nan-field", "non-finite field value after step");
            next[static_cast<size_t>(j) * field.nx + i] = val;
        }
    }
    field.values = std::move(next);
}

DiffCoefficients assemble_coefficients(const GraphPair& pair) {
    if (!pair_grids_match(pair)) throw SimError("invalid-params", "pair grids differ");
    const ScalarField2D& u = pair.u;
    const ScalarField2D& v = pair.v;
    const bool two_d = u.ny > 1;
    DiffCoefficients co;
    co.nx = u.nx;
    co.ny = u.ny;
    co.n = two_d ? 2 : 1;
    co.h = u.h;
    co.origin = u.origin;
    co.t = pair.t;
    const size_t sz = static_cast<size_t>(u.nx) * u.ny;
    co.a11.assign(sz, 0.0);
    co.b1.assign(sz, 0.0);
    if (two_d) {
        co.a12.assign(sz, 0.0);
        co.a22.assign(sz, 0.0);
        co.b2.assign(sz, 0.0);
    }
    std::vector<double> c1(sz, 0.0), c2(sz, 0.0);

    const int jlo = two_d ? 1 : 0, jhi = two_d ? u.ny - 1 : 1;
    double cb = 0.0;
    for (int j = jlo; j < jhi; ++j) {
        for (int i = 1; i < u.nx - 1; ++i) {
            const Stencil su = central(u, i, j);
            const Stencil sv = central(v, i, j);
            double A11 = 0, A12 = 0, A22 = 0, C1 = 0, C2 = 0;
            for (int k = 0; k < 16; ++k) {
                const double th = kGL.x[k], wq = kGL.w[k];
                const double qx = th * sv.ux + (1.0 - th) * su.ux;
                const double qy = th * sv.uy + (1.0 - th) * su.uy;
                const double pxx = th * sv.uxx + (1.0 - th) * su.uxx;
                const double pyy = th * sv.uyy + (1.0 - th) * su.uyy;
                const double pxy = th * sv.uxy + (1.0 - th) * su.uxy;
                const double g2 = qx * qx + qy * qy;
                const double den = 1.0 + g2;
                cb = std::max(cb, g2);
                A11 += wq * (1.0 - qx * qx / den);
                if (two_d) {
                    A12 += wq * (-qx * qy / den);
                    A22 += wq * (1.0 - qy * qy / den);
                }
                // dF/dq^j for F = tr P - (q^T P q)/(1+|q|^2):
                //   -2 (P q)_j / (1+|q|^2) + 2 q_j (q^T P q) / (1+|q|^2)^2
                const double Pq1 = pxx * qx + pxy * qy;
                const double Pq2 = pxy * qx + pyy * qy;
                const double qPq = qx * Pq1 + qy * Pq2;
                C1 += wq * (-2.0 * Pq1 / den + 2.0 * qx * qPq / (den * den));
                if (two_d) C2 += wq * (-2.0 * Pq2 / den + 2.0 * qy * qPq / (den * den));
            }
            const size_t idx = static_cast<size_t>(j) * u.nx + i;
            co.a11[idx] = A11;
            c1[idx] = C1;
            if (two_d) {
                co.a12[idx] = A12;
                co.a22[idx] = A22;
                c2[idx] = C2;
            }
        }
    }
    co.c_bound = cb;

    // b^j = c^j - d_i a^ij, with the divergence taken centrally on the
    // assembled a-grids (valid one node further in).
    const double inv2h = 1.0 / (2.0 * u.h);
    const int jlo2 = two_d ? 2 : 0, jhi2 = two_d ? u.ny - 2 : 1;
    for (int j = jlo2; j < jhi2; ++j) {
        for (int i = 2; i < u.nx - 2; ++i) {
            const size_t idx = static_cast<size_t>(j) * u.nx + i;
            const double da11_dx = (co.a11[idx + 1] - co.a11[idx - 1]) * inv2h;
            if (!two_d) {
                co.b1[idx] = c1[idx] - da11_dx;
                continue;
            }
            const size_t row = static_cast<size_t>(u.nx);
            const double da12_dy = (co.a12[idx + row] - co.a12[idx - row]) * inv2h;
            const double da12_dx = (co.a12[idx + 1] - co.a12[idx - 1]) * inv2h;
            const double da22_dy = (co.a22[idx + row] - co.a22[idx - row]) * inv2h;
            co.b1[idx] = c1[idx] - (da11_dx + da12_dy);
            co.b2[idx] = c2[idx] - (da12_dx + da22_dy);
        }
    }
    return co;
}

HypothesisReport verify_coefficient_hypotheses(const std::vector<DiffCoefficients>& history) {
    if (history.size() < 3)
        throw SimError("invalid-params", "hypothesis check needs >= 3 time slices");
    HypothesisReport rep;
    rep.eig_min = 1e300;
    rep.eig_max = -1e300;
    double cb = 0.0;
    for (const auto& co : history) cb = std::max(cb, co.c_bound);
    rep.c_bound = cb;
    const double lo = 1.0 / (1.0 + cb) - 1e-9, hi = 1.0 + 1e-9;
    rep.ellipticity_ok = true;

    const auto& ref = history.front();
    const bool two_d = ref.n == 2;
    const int ma = DiffCoefficients::margin_a, mb = DiffCoefficients::margin_b;
    const int jlo = two_d ? ma : 0, jhi = two_d ? ref.ny - ma : 1;

    for (const auto& co : history) {
        for (int j = jlo; j < jhi; ++j) {
            for (int i = ma; i < co.nx - ma; ++i) {
                const size_t idx = static_cast<size_t>(j) * co.nx + i;
                double e1, e2;
                if (two_d) {
                    const double tr = co.a11[idx] + co.a22[idx];
                    const double det = co.a11[idx] * co.a22[idx] - co.a12[idx] * co.a12[idx];
                    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
                    e1 = tr / 2.0 - disc;
                    e2 = tr / 2.0 + disc;
                } else {
                    e1 = e2 = co.a11[idx];
                }
                rep.eig_min = std::min(rep.eig_min, e1);
                rep.eig_max = std::max(rep.eig_max, e2);
                if (e1 < lo || e2 > hi) rep.ellipticity_ok = false;
            }
        }
        const int jlo2 = two_d ? mb : 0, jhi2 = two_d ? co.ny - mb : 1;
        for (int j = jlo2; j < jhi2; ++j) {
            for (int i = mb; i < co.nx - mb; ++i) {
                const size_t idx = static_cast<size_t>(j) * co.nx + i;
                rep.b_sup = std::max(rep.b_sup, std::abs(co.b1[idx]));
                if (two_d) rep.b_sup = std::max(rep.b_sup, std::abs(co.b2[idx]));
            }
        }
    }

    // Parabolic Lipschitz estimate: all node pairs within 4h spatially, any
    // pair of slices (including equal times).
    const double h = ref.h;
    const int R = 4;
    auto entry_gap = [&](const DiffCoefficients& p, size_t ip, const DiffCoefficients& q,
                         size_t iq) {
        double d = std::abs(p.a11[ip] - q.a11[iq]);
        if (two_d) {
            d = std::max(d, std::abs(p.a12[ip] - q.a12[iq]));
            d = std::max(d, std::abs(p.a22[ip] - q.a22[iq]));
        }
        return d;
    };
    for (size_t s1 = 0; s1 < history.size(); ++s1) {
        for (size_t s2 = s1; s2 < history.size(); ++s2) {
            const auto& P = history[s1];
            const auto& Q = history[s2];
            const double dt = std::abs(Q.t - P.t);
            for (int j = jlo; j < jhi; ++j) {
                for (int i = ma; i < P.nx - ma; ++i) {
                    const size_t ip = static_cast<size_t>(j) * P.nx + i;
                    for (int dj = two_d ? -R : 0; dj <= (two_d ? R : 0); ++dj) {
                        for (int di = -R; di <= R; ++di) {
                            if (di * di + dj * dj > R * R) continue;
                            if (s1 == s2 && di == 0 && dj == 0) continue;
                            const int i2 = i + di, j2 = j + dj;
                            if (i2 < ma || i2 >= P.nx - ma) continue;
                            if (two_d && (j2 < ma || j2 >= P.ny - ma)) continue;
                            const size_t iq = static_cast<size_t>(j2) * P.nx + i2;
                            const double dist2 =
                                (di * di + dj * dj) * h * h;
                            const double pd = std::sqrt(dist2 + dt);
                            if (pd == 0.0) continue;
                            rep.lipschitz_est =
                                std::max(rep.lipschitz_est, entry_gap(P, ip, Q, iq) / pd);
                        }
                    }
                }
            }
        }
    }
    return rep;
}

namespace {

double tie_break(double v) { return v == 0.0 ? 1e-12 : v; }

// Shielded sub-box index range [lo, hi) covering the middle half.
void middle_half(int n, int& lo, int& hi) {
    lo = n / 4;
    hi = n - n / 4;
}

struct NodalReading {
    std::vector<Vec2> points;
    int count = 0;
    double measure = 0.0;
};

NodalReading read_nodal(const ScalarField2D& u, const ScalarField2D& v) {
    NodalReading out;
    const bool two_d = u.ny > 1;
    int ilo, ihi;
    middle_half(u.nx, ilo, ihi);
    if (!two_d) {
        for (int i = ilo; i + 1 < ihi; ++i) {
            const double fa = tie_break(v.at(i, 0) - u.at(i, 0));
            const double fb = tie_break(v.at(i + 1, 0) - u.at(i + 1, 0));
            if ((fa > 0.0) == (fb > 0.0)) continue;
            const double s = fa / (fa - fb);
            out.points.push_back({u.origin.x + (i + s) * u.h, 0.0});
        }
        out.count = static_cast<int>(out.points.size());
        out.measure = static_cast<double>(out.count);
        return out;
    }
    int jlo, jhi;
    middle_half(u.ny, jlo, jhi);
    ScalarField2D w;
    w.nx = ihi - ilo;
    w.ny = jhi - jlo;
    w.h = u.h;
    w.origin = {u.origin.x + ilo * u.h, u.origin.y + jlo * u.h};
    w.values.resize(static_cast<size_t>(w.nx) * w.ny);
    for (int j = jlo; j < jhi; ++j)
        for (int i = ilo; i < ihi; ++i)
            w.values[static_cast<size_t>(j - jlo) * w.nx + (i - ilo)] = v.at(i, j) - u.at(i, j);
    auto chains = extract_contours(w, 0.0);
    out.count = static_cast<int>(chains.size());
    for (const auto& c : chains) {
        out.measure += polyline_length(c);
        for (const auto& p : c.vertices) out.points.push_back(p);
    }
    return out;
}

double l2_middle(const ScalarField2D& u, const ScalarField2D& v) {
    const bool two_d = u.ny > 1;
    int ilo, ihi;
    middle_half(u.nx, ilo, ihi);
    double sum = 0.0;
    if (!two_d) {
        for (int i = ilo; i < ihi; ++i) {
            const double w = v.at(i, 0) - u.at(i, 0);
            const double wt = (i == ilo || i == ihi - 1) ? 0.5 : 1.0;
            sum += wt * w * w;
        }
        return sum * u.h;
    }
    int jlo, jhi;
    middle_half(u.ny, jlo, jhi);
    for (int j = jlo; j < jhi; ++j) {
        for (int i = ilo; i < ihi; ++i) {
            const double w = v.at(i, j) - u.at(i, j);
            const double wt = ((i == ilo || i == ihi - 1) ? 0.5 : 1.0) *
                              ((j == jlo || j == jhi - 1) ? 0.5 : 1.0);
            sum += wt * w * w;
        }
    }
    return sum * u.h * u.h;
}

}  // namespace

NodalSeries evolve_pair_and_track_nodal(GraphPair pair, double T, double sample_dt,
                                        int coeff_slices) {
    if (!pair_grids_match(pair)) throw SimError("invalid-params", "pair grids differ");
    if (T <= 0.0 || sample_dt <= 0.0)
        throw SimError("invalid-params", "horizon and sample_dt must be positive");
    NodalSeries series;
    const double h = pair.u.h;
    const int nsamples = static_cast<int>(std::floor(T / sample_dt + 1e-9)) + 1;
    const int slice_stride = std::max(1, (nsamples - 1) / std::max(1, coeff_slices - 1));
    std::vector<double> den_hist, t_hist;
    double t = 0.0;
    for (int si = 0; si < nsamples; ++si) {
        const double target = std::min(si * sample_dt, T);
        while (t < target - 1e-13) {
            const double dt = std::min(target - t, 0.9 * 0.2 * h * h);
            step_graphical(pair.u, dt);
            step_graphical(pair.v, dt);
            t += dt;
            pair.t = t;
        }
        double wmax = 0.0;
        for (size_t k = 0; k < pair.u.values.size(); ++k)
            wmax = std::max(wmax, std::abs(pair.v.values[k] - pair.u.values[k]));
        if (wmax == 0.0)
            throw SimError("flows-coincide", "u == v exactly at t=" + format_double(t));

        auto reading = read_nodal(pair.u, pair.v);
        IntersectionSample s;
        s.t = t;
        s.component_count = reading.count;
        s.measure_est = reading.measure;
        PointCloud pc{std::move(reading.points), pair.n(), CloudKind::Planar};
        if (!pc.empty()) s.dim_est = box_dimension(pc, monitor_dim_scales(h));
        s.points = std::move(pc);
        series.mon.samples.push_back(std::move(s));

        const double den = l2_middle(pair.u, pair.v);
        den_hist.push_back(den);
        t_hist.push_back(t);
        double num = 0.0;
        int used = 0;
        for (size_t k = 1; k < den_hist.size(); ++k) {
            if (t_hist[k] <= t - 4.0) continue;
            num += 0.5 * (den_hist[k - 1] + den_hist[k]) * (t_hist[k] - t_hist[k - 1]);
            ++used;
        }
        if (used == 0) num = den * sample_dt;  // degenerate window seed
        series.lambda.push_back(den > 0.0 ? num / den : 0.0);

        if (si % slice_stride == 0 || si + 1 == nsamples)
            series.coeff_history.push_back(assemble_coefficients(pair));
    }
    evaluate_count_series(series.mon);
    if (series.coeff_history.size() >= 3)
        series.hypothesis = verify_coefficient_hypotheses(series.coeff_history);
    return series;
}

OneSidedVerdict one_sided_test(const ScalarField2D& w) {
    if (!w.valid()) throw SimError("nan-field", "invalid scalar field");
    OneSidedVerdict out;
    double lo = 1e300, hi = -1e300;
    for (double v : w.values) {
        const double p = tie_break(v);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    out.sign_change = lo < 0.0 && hi > 0.0;
    if (w.ny == 1) {
        int count = 0;
        for (int i = 0; i + 1 < w.nx; ++i) {
            const double fa = tie_break(w.at(i, 0)), fb = tie_break(w.at(i + 1, 0));
            if ((fa > 0.0) != (fb > 0.0)) ++count;
        }
        out.nodal_measure_est = count;
    } else {
        out.nodal_measure_est = contours_length(extract_contours(w, 0.0));
    }
    out.positivity_ok = !out.sign_change || out.nodal_measure_est > w.h;
    return out;
}

double divergence_form_residual(const GraphPair& pair, double dt) {
    if (!pair_grids_match(pair)) throw SimError("invalid-params", "pair grids differ");
    GraphPair p = pair;
    const auto co = assemble_coefficients(p);
    const ScalarField2D u0 = p.u, v0 = p.v;
    step_graphical(p.u, dt);
    step_graphical(p.v, dt);

    const bool two_d = u0.ny > 1;
    const int nx = u0.nx, ny = u0.ny;
    const double h = u0.h;
    ScalarField2D w0 = u0;
    for (size_t k = 0; k < w0.values.size(); ++k)
        w0.values[k] = v0.values[k] - u0.values[k];

    // Flux g^i = a^ij d_j w on the full a-validity range, then its divergence.
    const size_t sz = w0.values.size();
    std::vector<double> g1(sz, 0.0), g2(sz, 0.0);
    const double inv2h = 1.0 / (2.0 * h);
    const int jlo = two_d ? 1 : 0, jhi = two_d ? ny - 1 : 1;
    const size_t row = static_cast<size_t>(nx);
    for (int j = jlo; j < jhi; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const size_t idx = static_cast<size_t>(j) * nx + i;
            const double wx = (w0.values[idx + 1] - w0.values[idx - 1]) * inv2h;
            const double wy = two_d ? (w0.values[idx + row] - w0.values[idx - row]) * inv2h : 0.0;
            g1[idx] = co.a11[idx] * wx + (two_d ? co.a12[idx] * wy : 0.0);
            if (two_d) g2[idx] = co.a12[idx] * wx + co.a22[idx] * wy;
        }
    }

    int ilo, ihi, jmlo = 0, jmhi = 1;
    middle_half(nx, ilo, ihi);
    if (two_d) middle_half(ny, jmlo, jmhi);
    double worst = 0.0;
    for (int j = std::max(two_d ? 3 : 0, jmlo); j < std::min(two_d ? ny - 3 : 1, jmhi); ++j) {
        for (int i = std::max(3, ilo); i < std::min(nx - 3, ihi); ++i) {
            const size_t idx = static_cast<size_t>(j) * nx + i;
            const double wt = ((p.v.values[idx] - p.u.values[idx]) - w0.values[idx]) / dt;
            const double wx = (w0.values[idx + 1] - w0.values[idx - 1]) * inv2h;
            const double wy = two_d ? (w0.values[idx + row] - w0.values[idx - row]) * inv2h : 0.0;
            double div = (g1[idx + 1] - g1[idx - 1]) * inv2h;
            if (two_d) div += (g2[idx + row] - g2[idx - row]) * inv2h;
            const double res = wt - div - co.b1[idx] * wx - (two_d ? co.b2[idx] * wy : 0.0);
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

}  // namespace mcflab
