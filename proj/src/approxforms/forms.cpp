#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "sfl/approxforms.hpp"

namespace sfl {

namespace {

using GL = boost::math::quadrature::gauss<double, 16>;

/// Radial nodes r = r_in + s^2 with Gauss panels in s; weights include dr = 2 s ds.
std::vector<std::pair<double, double>> radial_nodes(double r_in, double r_out, std::size_t panels) {
    const double S = std::sqrt(r_out - r_in);
    std::vector<std::pair<double, double>> out;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = S * k / panels, b = S * (k + 1) / panels;
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            for (int sgn : {-1, 1}) {
                if (xs[j] == 0.0 && sgn > 0) continue;
                const double s = m + sgn * h * xs[j];
                out.emplace_back(r_in + s * s, h * ws[j] * 2 * s);
            }
        }
    }
    return out;
}

void check_region(const PolarRegion& W, const QuadratureOptions& q) {
    if (!(W.r_in >= 0.0 && W.r_out > W.r_in)) throw InputError("polar region: need 0 <= r_in < r_out");
    if (q.angles < 4 || q.panels < 1) throw InputError("quadrature: too few nodes");
}

/// Sum of f(z) dA over the region.
template <class F>
cplx area_sum(const PolarRegion& W, const QuadratureOptions& q, F&& f) {
    cplx total = 0.0;
    const double dth = 2 * M_PI / q.angles;
    for (const auto& [r, w] : radial_nodes(W.r_in, W.r_out, q.panels)) {
        cplx ring = 0.0;
        for (std::size_t k = 0; k < q.angles; ++k) ring += f(W.center + std::polar(r, dth * k));
        total += ring * (w * r * dth);
    }
    return total;
}

cplx tr_dag(const Mat2& X, const Mat2& Y, const Mat2& H) { return (X * adjoint(Y, H)).trace(); }

Mat2 diag_pm(cplx a) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = a;
    m(1, 1) = -a;
    return m;
}

}  // namespace

MetricField model_metric_field(const ModelMetricProfile& profile) {
    return {[&profile](cplx z) { return model_metric_at(profile, z); },
            [&profile](cplx z) {
                const double r = std::abs(z);
                if (r == 0.0) return Mat2(Mat2::Zero());
                return diag_pm(profile.dpsi_at(r) * std::conj(z) / (2 * r));
            }};
}

MetricField glued_metric_field(const GluedMetric& g) {
    return {[&g](cplx z) { return g.local(z); },
            [&g](cplx z) {
                if (z == cplx(0.0)) throw DomainError("glued metric: connection singular at zeta = 0");
                // psi = -log|zeta| / 2 + w, d psi / d zeta = -1 / (4 zeta) + conj(d w / d zetabar)
                if (g.schedule().chi(std::pow(std::abs(z), 1.5)) == 1.0) {
                    const double r = std::abs(z);
                    return diag_pm(g.profile().dpsi_at(r) * std::conj(z) / (2 * r));
                }
                return diag_pm(-0.25 / z + std::conj(g.dgauge_bar(z)));
            }};
}

cplx l2_pairing_forms(const FormField& r1, const FormField& r2, const MetricField& m, const PolarRegion& W,
                      const QuadratureOptions& q) {
    check_region(W, q);
    return 4.0 * area_sum(W, q, [&](cplx z) {
               const FormValue a = r1(z), b = r2(z);
               const Mat2 H = m.H(z);
               return tr_dag(a.dz, b.dz, H) + tr_dag(a.dzbar, b.dzbar, H);
           });
}

StokesReport stokes_check(const std::function<Mat2(cplx)>& a, const FormField& b, const MetricField& m,
                          const std::function<Mat2(cplx)>& Theta, const PolarRegion& W, double h,
                          const QuadratureOptions& q) {
    check_region(W, q);
    if (!(h > 0.0)) throw InputError("stokes_check: step must be positive");
    const cplx I(0.0, 1.0);
    StokesReport rep;
    rep.h = h;
    double sup_a = 0.0, sup_b = 0.0;
    const auto interior = [&](cplx z) {
        const Mat2 ax = (a(z + h) - a(z - h)) / (2 * h), ay = (a(z + I * h) - a(z - I * h)) / (2 * h);
        const Mat2 da = 0.5 * (ax - I * ay), dbar_a = 0.5 * (ax + I * ay);
        const auto B1 = [&](cplx w) { return b(w).dz; };
        const Mat2 bx = (B1(z + h) - B1(z - h)) / (2 * h), by = (B1(z + I * h) - B1(z - I * h)) / (2 * h);
        const Mat2 dbar_b1 = 0.5 * (bx + I * by), d_b1 = 0.5 * (bx - I * by);
        const Mat2 A = a(z), H = m.H(z), T = Theta(z), Cn = m.A(z);
        const FormValue B = b(z);
        const Mat2 Td = adjoint(T, H);
        const Mat2 dh_a = da + Cn * A - A * Cn;
        const Mat2 Omega = T * B.dzbar - B.dzbar * T - dbar_b1;
        sup_a = std::max(sup_a, A.norm() + da.norm() + dbar_a.norm());
        sup_b = std::max(sup_b, B.dz.norm() + B.dzbar.norm() + d_b1.norm() + dbar_b1.norm());
        const cplx lhs = tr_dag(dh_a, B.dz, H) + tr_dag(Td * A - A * Td, B.dzbar, H);
        return std::array<cplx, 2>{lhs, tr_dag(A, Omega, H)};
    };
    // both integrals in one sweep
    cplx lhs = 0.0, adj = 0.0;
    const double dth = 2 * M_PI / q.angles;
    for (const auto& [r, w] : radial_nodes(W.r_in, W.r_out, q.panels)) {
        for (std::size_t k = 0; k < q.angles; ++k) {
            const auto v = interior(W.center + std::polar(r, dth * k));
            lhs += v[0] * (w * r * dth);
            adj += v[1] * (w * r * dth);
        }
    }
    rep.lhs = 4.0 * lhs;
    rep.adjoint = 4.0 * adj;
    // 2i contour of Tr(a b1^dagger) dzbar over the outer circle minus the inner one
    cplx bd = 0.0;
    const std::size_t n = 4 * q.angles;
    for (double r : {W.r_out, W.r_in}) {
        if (r == 0.0) continue;
        const double sgn = r == W.r_out ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double th = 2 * M_PI * k / n;
            const cplx z = W.center + std::polar(r, th);
            const cplx dzbar = -I * std::polar(r, -th) * (2 * M_PI / n);
            bd += sgn * tr_dag(a(z), b(z).dz, m.H(z)) * dzbar;
        }
    }
    rep.boundary = 2.0 * I * bd;
    rep.defect = std::abs(rep.lhs - rep.boundary - rep.adjoint);
    rep.norms = sup_a * sup_b * M_PI * (W.r_out * W.r_out - W.r_in * W.r_in);
    return rep;
}

cplx aux_boundary_pairing(const LocalAuxTerm& term, double radius, std::size_t n) {
    if (!(radius > 0.0) || n < 8) throw InputError("aux_boundary_pairing: need radius > 0 and n >= 8");
    // Functions of the fibre coordinate xi (xi^2 = (9/4) zeta) become a0 id + a1 f with a0, a1 the
    // even part and the odd part over xi; the trace sums over both sheets.
    const PowerSeries alpha = term.n1.integrate();
    const auto F = [](const std::function<cplx(cplx)>& x, cplx zeta) {
        const cplx xi = 1.5 * std::sqrt(zeta);
        const cplx p = x(xi), m = x(-xi);
        return Mat2(0.5 * (p + m) * Mat2::Identity() + (0.5 * (p - m) / xi) * ModelHiggs::F(zeta));
    };
    const auto alpha1 = [&](cplx xi) { return alpha.evaluate(xi) / xi; };
    const auto ups = [&](cplx xi) { return term.upsilon.evaluate(xi); };
    // d beta / d zeta = n2(xi) d xi / d zeta = n2(xi) 9 / (8 xi)
    const auto dbeta = [&](cplx xi) { return term.n2.evaluate(xi) * 9.0 / (8.0 * xi); };
    cplx sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double th = 2 * M_PI * (k + 0.5) / n;
        const cplx zeta = std::polar(radius, th);
        const cplx dzeta = cplx(0.0, 1.0) * zeta * (2 * M_PI / n);
        sum += (F(alpha1, zeta) * F(ups, zeta) * F(dbeta, zeta)).trace() * dzeta;
    }
    return cplx(0.0, 2.0) * sum;
}

}  // namespace sfl
