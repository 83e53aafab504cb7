#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sfl/spectral.hpp"

namespace sfl {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

int degree(const HolDifferential& nu) {
    int d = static_cast<int>(nu.q.size()) - 1;
    while (d >= 0 && nu.q[static_cast<std::size_t>(d)] == cplx(0.0)) --d;
    return d;
}

void check_integrable(const SpectralCurve& curve, const HolDifferential& nu) {
    const int d = degree(nu);
    if (d >= 0 && d > curve.genus() - 1)
        throw InputError("l2 pairing: numerator degree above genus - 1 is not square integrable at infinity");
}

std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
    v.push_back(lo);
    v.push_back(hi);
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (x < lo || x > hi) continue;
        if (out.empty() || x - out.back() > 1e-12 * (1 + std::abs(x))) out.push_back(x);
    }
    return out;
}

/// Integrates a real function over [a, b] split at `cuts` with tanh-sinh.
template <class F>
double tanh_sinh_panels(const F& f, const std::vector<double>& pts, double tol) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) s += ts.integrate(f, pts[k], pts[k + 1], tol);
    return s;
}

template <class F>
double gk_panels(const F& f, const std::vector<double>& pts, double tol) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) s += GK::integrate(f, pts[k], pts[k + 1], 12, tol);
    return s;
}

/// Both-sheet density 8 f1 conj(f2) / |p| of the holomorphic pairing.
struct Density {
    const SpectralCurve& c;
    const HolDifferential& a;
    const HolDifferential& b;
    cplx operator()(cplx z) const {
        return 8.0 * a.numerator(z) * std::conj(b.numerator(z)) / std::abs(c.phi().p(z));
    }
    /// 4 (|f1|^2 + |f2|^2) / |p|, which dominates |density|.
    double envelope(cplx z) const {
        return 4.0 * (std::norm(a.numerator(z)) + std::norm(b.numerator(z))) / std::abs(c.phi().p(z));
    }
    /// part 0, 1: Re, Im of the density shifted by the envelope (nonnegative); part 2: the envelope.
    double shifted(cplx z, int part) const {
        const double e = envelope(z);
        if (part == 2) return e;
        const cplx v = (*this)(z);
        return (part == 0 ? v.real() : v.imag()) + e;
    }
};

// Relative tolerances are meaningful for the nonnegative shifted parts even when the pairing vanishes.
cplx assemble(const double parts[3]) { return cplx(parts[0] - parts[2], parts[1] - parts[2]); }

cplx interior_polar(const Density& f, double R, double tol) {
    std::vector<double> rs, ths;
    for (const auto& z : f.c.branch_points()) {
        const double r = std::abs(z.location);
        if (r > 0) {
            rs.push_back(r);
            double th = std::arg(z.location);
            if (th < 0) th += 2 * M_PI;
            ths.push_back(th);
        }
    }
    const auto rpts = sorted_unique(rs, 0.0, R);
    const auto tpts = sorted_unique(ths, 0.0, 2 * M_PI);
    double parts[3];
    for (int part = 0; part < 3; ++part) {
        auto inner = [&](double r) {
            auto g = [&](double th) { return f.shifted(std::polar(r, th), part) * r; };
            return tanh_sinh_panels(g, tpts, tol);
        };
        parts[part] = tanh_sinh_panels(inner, rpts, tol);
    }
    return assemble(parts);
}

cplx interior_cartesian(const Density& f, double R, double tol) {
    std::vector<double> ys, xs;
    for (const auto& z : f.c.branch_points()) {
        ys.push_back(z.location.imag());
        xs.push_back(z.location.real());
    }
    const auto ypts = sorted_unique(ys, -R, R);
    double parts[3];
    for (int part = 0; part < 3; ++part) {
        auto inner = [&](double y) {
            const double X = std::sqrt(std::max(0.0, R * R - y * y));
            if (X == 0.0) return 0.0;
            auto g = [&](double x) { return f.shifted(cplx(x, y), part); };
            return gk_panels(g, sorted_unique(xs, -X, X), tol);
        };
        parts[part] = tanh_sinh_panels(inner, ypts, tol);
    }
    return assemble(parts);
}

// |z| > R through z = R e^{i th} / u, dA = R^2 u^{-3} du dth.
cplx exterior(const Density& f, double R, double tol) {
    double parts[3];
    for (int part = 0; part < 3; ++part) {
        auto inner = [&](double u) {
            if (u <= 0) return 0.0;
            auto g = [&](double th) { return f.shifted(std::polar(R / u, th), part) * R * R / (u * u * u); };
            return GK::integrate(g, 0.0, 2 * M_PI, 12, tol);
        };
        parts[part] = GK::integrate(inner, 0.0, 1.0, 12, tol);
    }
    return assemble(parts);
}

double tail_bound(const SpectralCurve& c, const HolDifferential& a, const HolDifferential& b, double R) {
    const int ka = degree(a), kb = degree(b);
    if (ka < 0 || kb < 0) return 0.0;
    const auto& p = c.phi().coeffs();
    const int n = c.phi().degree();
    // |q| <= r^k sum |q_j| R^{j-k} and |p| >= r^n (|p_n| - sum |p_j| R^{j-n}) on |z| >= R
    auto qhat = [&](const HolDifferential& h, int k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += std::abs(h.q[static_cast<std::size_t>(j)]) * std::pow(R, j - k);
        return s;
    };
    double phat = std::abs(p.back());
    for (int j = 0; j < n; ++j) phat -= std::abs(p[static_cast<std::size_t>(j)]) * std::pow(R, j - n);
    if (phat <= 0) return std::numeric_limits<double>::infinity();
    const int e = ka + kb - n + 2;
    return 16 * M_PI * qhat(a, ka) * qhat(b, kb) / phat * std::pow(R, e) / (-e);
}

}  // namespace

L2Report l2_pairing_hol(const SpectralCurve& curve, const HolDifferential& nu1, const HolDifferential& nu2,
                        const L2Options& opt) {
    if (!opt.interior_only) {
        check_integrable(curve, nu1);
        check_integrable(curve, nu2);
    }
    L2Report rep;
    double R = opt.radius;
    if (R <= 0) {
        double m = 0.0;
        for (const auto& z : curve.branch_points()) m = std::max(m, std::abs(z.location));
        R = 2 * m + 1;
    }
    for (const auto& z : curve.branch_points())
        if (std::abs(z.location) >= R) throw InputError("l2 pairing: branch point outside the inner disc");
    rep.radius = R;
    if (degree(nu1) < 0 || degree(nu2) < 0) return rep;
    const Density f{curve, nu1, nu2};
    rep.interior = opt.scheme == QuadratureScheme::Polar ? interior_polar(f, R, opt.tol)
                                                          : interior_cartesian(f, R, opt.tol);
    if (!opt.interior_only) {
        rep.exterior = exterior(f, R, opt.tol);
        rep.tail_bound = tail_bound(curve, nu1, nu2, R);
    }
    rep.value = rep.interior + rep.exterior;
    if (!std::isfinite(rep.value.real()) || !std::isfinite(rep.value.imag()))
        throw InputError("l2 pairing: integrand not integrable");
    return rep;
}

L2Report l2_pairing_antihol(const SpectralCurve& curve, const HolDifferential& mu1, const HolDifferential& mu2,
                            const L2Options& opt) {
    // tau_j = conj(m_j) dzbar: -2i tau1 ^ conj(tau2) = 4 conj(m1) m2 dA per sheet
    L2Report r = l2_pairing_hol(curve, mu1, mu2, opt);
    r.value = std::conj(r.value);
    r.interior = std::conj(r.interior);
    r.exterior = std::conj(r.exterior);
    return r;
}

Eigen::MatrixXcd GramBlocks::full() const {
    const Eigen::Index nh = hor.rows(), nv = ver.rows();
    Eigen::MatrixXcd m(nh + nv, nh + nv);
    m.topLeftCorner(nh, nh) = hor;
    m.bottomRightCorner(nv, nv) = ver;
    m.topRightCorner(nh, nv) = hor_ver;
    m.bottomLeftCorner(nv, nh) = hor_ver.adjoint();
    return m;
}

GramBlocks semiflat_gram(const SpectralCurve& curve, const std::vector<HolDifferential>& hor,
                         const std::vector<HolDifferential>& ver, const L2Options& opt) {
    const auto nh = static_cast<Eigen::Index>(hor.size()), nv = static_cast<Eigen::Index>(ver.size());
    GramBlocks g{Eigen::MatrixXcd(nh, nh), Eigen::MatrixXcd(nv, nv), Eigen::MatrixXcd::Zero(nh, nv)};
    // the densities of (i, j) and (j, i) are conjugate pointwise
    for (Eigen::Index i = 0; i < nh; ++i)
        for (Eigen::Index j = i; j < nh; ++j) {
            g.hor(i, j) = l2_pairing_hol(curve, hor[static_cast<std::size_t>(i)], hor[static_cast<std::size_t>(j)], opt).value;
            g.hor(j, i) = std::conj(g.hor(i, j));
        }
    for (Eigen::Index i = 0; i < nv; ++i)
        for (Eigen::Index j = i; j < nv; ++j) {
            g.ver(i, j) = l2_pairing_antihol(curve, ver[static_cast<std::size_t>(i)], ver[static_cast<std::size_t>(j)], opt).value;
            g.ver(j, i) = std::conj(g.ver(i, j));
        }
    return g;
}

GramBlocks aux_gram(const SpectralCurve& curve, const std::vector<HolDifferential>& hor,
                    const std::vector<HolDifferential>& ver, const AuxInput& eta) {
    const auto nh = static_cast<Eigen::Index>(hor.size()), nv = static_cast<Eigen::Index>(ver.size());
    GramBlocks g{Eigen::MatrixXcd::Zero(nh, nh), Eigen::MatrixXcd::Zero(nv, nv), Eigen::MatrixXcd::Zero(nh, nv)};
    for (Eigen::Index i = 0; i < nh; ++i)
        for (Eigen::Index j = 0; j < nv; ++j)
            g.hor_ver(i, j) = aux_pairing(curve, hor[static_cast<std::size_t>(i)], ver[static_cast<std::size_t>(j)], eta);
    return g;
}

AuxSmallnessReport aux_smallness_report(const SpectralCurve& curve, const std::vector<HolDifferential>& hor,
                                        const std::vector<HolDifferential>& ver,
                                        const std::function<AuxInput(double)>& eta_t,
                                        const std::vector<double>& ts, const L2Options& opt) {
    AuxSmallnessReport rep;
    const GramBlocks sf = semiflat_gram(curve, hor, ver, opt);
    Eigen::LLT<Eigen::MatrixXcd> lh(sf.hor), lv(sf.ver);
    if (lh.info() != Eigen::Success || lv.info() != Eigen::Success)
        throw NumericalError("aux_smallness_report: semi-flat blocks not positive definite");
    const Eigen::MatrixXcd Lh = lh.matrixL(), Lv = lv.matrixL();
    std::vector<std::pair<double, double>> samples;
    for (double t : ts) {
        const GramBlocks aux = aux_gram(curve, hor, ver, eta_t(t));
        // G_h^{-1/2} A G_v^{-1/2} is unitarily equivalent to Lh^{-1} A Lv^{-*}
        const Eigen::MatrixXcd X = Lh.triangularView<Eigen::Lower>().solve(aux.hor_ver);
        const Eigen::MatrixXcd Y = Lv.triangularView<Eigen::Lower>().solve(X.adjoint()).adjoint();
        AuxSmallnessRow row;
        row.t = t;
        row.relative = Y.size() ? Eigen::JacobiSVD<Eigen::MatrixXcd>(Y).singularValues()(0) : 0.0;
        GramBlocks sum{sf.hor, sf.ver, aux.hor_ver};
        row.positive = Eigen::LLT<Eigen::MatrixXcd>(sum.full()).info() == Eigen::Success;
        rep.rows.push_back(row);
        if (row.relative > 0) samples.emplace_back(t, row.relative);
    }
    if (samples.size() >= 3) {
        // decay in t: -log(relative) = rate t + c
        rep.fit = fit_decay_rate(samples);
    }
    for (std::size_t k = rep.rows.size(); k-- > 0;) {
        if (!rep.rows[k].positive) break;
        rep.threshold = rep.rows[k].t;
    }
    return rep;
}

}  // namespace sfl
