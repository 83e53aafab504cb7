#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "sfl/localmodel.hpp"

namespace sfl {

namespace {

double hermite(const std::vector<double>& r, const std::vector<double>& u, const std::vector<double>& du, double x,
               bool derivative) {
    if (!(x >= r.front() && x <= r.back())) throw RegionError("model profile: radius outside the mesh");
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - r.begin(), 1), r.size() - 1) - 1;
    const double h = r[k + 1] - r[k], s = (x - r[k]) / h;
    if (derivative) {
        const double d00 = 6 * s * (s - 1), d10 = (1 - s) * (1 - 3 * s), d11 = s * (3 * s - 2);
        return (d00 * u[k] - d00 * u[k + 1]) / h + d10 * du[k] + d11 * du[k + 1];
    }
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u[k] + h10 * h * du[k] + h01 * u[k + 1] + h11 * h * du[k + 1];
}

/// Radius below which psi, and beyond which v, is interpolated.
double switch_radius(double t) { return std::pow(t, -2.0 / 3.0); }

}  // namespace

double ModelMetricProfile::psi_at(double r) const {
    if (r < switch_radius(t)) return psi.value(r);
    return v_at(r) - 0.5 * std::log(r);
}

double ModelMetricProfile::dpsi_at(double r) const {
    if (r < switch_radius(t)) return psi.derivative(r);
    return dv_at(r) - 0.5 / r;
}

double ModelMetricProfile::v_at(double r) const {
    if (r < switch_radius(t)) return r > 0.0 ? psi.value(r) + 0.5 * std::log(r) : -INFINITY;
    return hermite(psi.r, v, dv, r, false);
}

double ModelMetricProfile::dv_at(double r) const {
    if (r < switch_radius(t)) return psi.derivative(r) + 0.5 / r;
    return hermite(psi.r, v, dv, r, true);
}

ModelMetricProfile painleve_profile(double t, double r_max, const ProfileOptions& opt) {
    if (!(t >= 1.0)) throw PreconditionError("painleve_profile: need t >= 1");
    if (!(4.0 * t * std::pow(r_max, 1.5) >= 30.0))
        throw PreconditionError("painleve_profile: r_max too small for a decoupled far field");
    const std::size_t N = opt.cells;
    const double h = r_max / static_cast<double>(N);
    const double k = 9.0 * t * t;
    std::vector<double> r(N + 1), lr(N + 1), ell(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        r[i] = static_cast<double>(i) * h;
        lr[i] = i > 0 ? std::log(r[i]) : -INFINITY;
    }
    // ell[i] = log(r_{i+1} / r_i)
    for (std::size_t i = 1; i < N; ++i) ell[i] = std::log1p(1.0 / static_cast<double>(i));

    // x[0] = psi(0), x[i] = v(r_i) for 1 <= i < N, v(r_N) = 0
    const double rc = switch_radius(t);
    std::vector<double> x(N + 1, 0.0);
    x[0] = -0.5 * std::log(rc);
    for (std::size_t i = 1; i < N; ++i)
        x[i] = -0.25 * std::log1p(rc * rc / (r[i] * r[i])) * std::exp(-4.0 * t * std::pow(r[i], 1.5));

    auto vv = [&](const std::vector<double>& y, std::size_t i) { return i < N ? y[i] : 0.0; };
    // pointwise residuals of the discrete equation
    auto resid = [&](const std::vector<double>& y, std::vector<double>& E) {
        E.assign(N, 0.0);
        const double psi1 = y[1] - 0.5 * lr[1];
        E[0] = 4.0 * (psi1 - y[0]) / (h * h) + k * std::exp(-2.0 * y[0]);
        {
            const double fr = (vv(y, 2) - y[1]) / ell[1];
            const double fl = 0.5 + 0.5 * h * (psi1 - y[0]) / h;
            E[1] = (fr - fl) / (r[1] * h) - 2.0 * k * r[1] * std::sinh(2.0 * y[1]);
        }
        for (std::size_t i = 2; i < N; ++i) {
            const double fr = (vv(y, i + 1) - y[i]) / ell[i], fl = (y[i] - y[i - 1]) / ell[i - 1];
            E[i] = (fr - fl) / (r[i] * h) - 2.0 * k * r[i] * std::sinh(2.0 * y[i]);
        }
    };
    // control-volume form relative to the flux scale
    auto cv_norm = [&](const std::vector<double>& E) {
        double m = std::abs(E[0]) * h * h / 8.0;
        for (std::size_t i = 1; i < N; ++i) m = std::max(m, std::abs(E[i]) * r[i] * h);
        return std::isfinite(m) ? m : INFINITY;
    };
    auto n2 = [](const std::vector<double>& E) {
        double m = 0.0;
        for (double e : E) m += e * e;
        return std::isfinite(m) ? std::sqrt(m) : INFINITY;
    };

    std::vector<double> E, Et, xt;
    resid(x, E);
    double res = cv_norm(E);
    int it = 0, polish = 0;
    double rel_step = INFINITY;
    for (; it < opt.max_iter; ++it) {
        // past the tolerance, keep going until every component has settled to relative precision
        if (res <= opt.tol && (rel_step < 1e-13 || ++polish > 12)) break;
        std::vector<double> a(N, 0.0), b(N), c(N, 0.0), d(N);
        b[0] = -4.0 / (h * h) - 2.0 * k * std::exp(-2.0 * x[0]);
        c[0] = 4.0 / (h * h);
        a[1] = 0.5 / (r[1] * h);
        b[1] = (-1.0 / ell[1] - 0.5) / (r[1] * h) - 4.0 * k * r[1] * std::cosh(2.0 * x[1]);
        c[1] = N > 2 ? 1.0 / ell[1] / (r[1] * h) : 0.0;
        for (std::size_t i = 2; i < N; ++i) {
            a[i] = 1.0 / ell[i - 1] / (r[i] * h);
            c[i] = i + 1 < N ? 1.0 / ell[i] / (r[i] * h) : 0.0;
            b[i] = -(1.0 / ell[i] + 1.0 / ell[i - 1]) / (r[i] * h) - 4.0 * k * r[i] * std::cosh(2.0 * x[i]);
        }
        for (std::size_t i = 0; i < N; ++i) d[i] = -E[i];
        const std::vector<double> dx = thomas_solve(a, b, c, d);
        const double n0 = n2(E);
        double lambda = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
            xt = x;
            for (std::size_t i = 0; i < N; ++i) xt[i] += lambda * dx[i];
            resid(xt, Et);
            const double nt = n2(Et);
            // near roundoff the 2-norm may stall; accept polishing steps that keep the residual level
            if (nt < n0 || (res <= opt.tol && cv_norm(Et) <= 10.0 * res)) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            if (res <= opt.tol) break;
            throw ConvergenceError("painleve_profile: line search stalled", res, it + 1);
        }
        rel_step = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            if (xt[i] != 0.0) rel_step = std::max(rel_step, std::abs(xt[i] - x[i]) / std::abs(xt[i]));
        x.swap(xt);
        E.swap(Et);
        res = cv_norm(E);
    }
    if (res > opt.tol) throw ConvergenceError("painleve_profile: no convergence", res, it);

    ModelMetricProfile p;
    p.t = t;
    p.r_max = r_max;
    p.iterations = it;
    p.residual = res;
    double pw = 0.0;
    for (double e : E) pw = std::max(pw, std::abs(e));
    p.pointwise = pw;
    p.psi.r = r;
    p.psi.u.assign(N + 1, 0.0);
    p.psi.du.assign(N + 1, 0.0);
    p.v.assign(N + 1, 0.0);
    p.dv.assign(N + 1, 0.0);
    p.psi.u[0] = x[0];
    p.v[0] = -INFINITY;
    for (std::size_t i = 1; i <= N; ++i) {
        p.v[i] = vv(x, i);
        p.psi.u[i] = p.v[i] - 0.5 * lr[i];
    }
    for (std::size_t i = 1; i < N; ++i) {
        if (r[i] < rc) {
            p.psi.du[i] = (p.psi.u[i + 1] - p.psi.u[i - 1]) / (2 * h);
            p.dv[i] = p.psi.du[i] + 0.5 / r[i];
        } else {
            p.dv[i] = (p.v[i + 1] - p.v[i - 1]) / (2 * h);
            p.psi.du[i] = p.dv[i] - 0.5 / r[i];
        }
    }
    p.dv[N] = (3 * p.v[N] - 4 * p.v[N - 1] + p.v[N - 2]) / (2 * h);
    p.psi.du[N] = p.dv[N] - 0.5 / r[N];
    p.dv[0] = INFINITY;
    return p;
}

double shooting_psi0(double t, double r_out) {
    using State = std::array<double, 2>;
    const double k = 9.0 * t * t;
    auto rhs = [k](const State& y, State& dy, double r) {
        dy[0] = y[1];
        dy[1] = k * (r * r * std::exp(2.0 * y[0]) - std::exp(-2.0 * y[0])) - y[1] / r;
    };
    // +1: v turns positive (start too high); -1: v turns back down (start too low)
    auto classify = [&](double psi0) {
        const double c = -0.25 * k * std::exp(-2.0 * psi0);
        double r = 1e-3 * switch_radius(t);
        State y{psi0 + c * r * r, 2.0 * c * r};
        auto stepper = boost::numeric::odeint::make_dense_output(1e-14, 1e-14,
                                                                 boost::numeric::odeint::runge_kutta_dopri5<State>());
        stepper.initialize(y, r, 1e-4 * r);
        while (stepper.current_time() < r_out) {
            stepper.do_step(rhs);
            const double rr = stepper.current_time();
            const State& s = stepper.current_state();
            const double v = s[0] + 0.5 * std::log(rr), dv = s[1] + 0.5 / rr;
            if (v > 0.0) return 1;
            if (dv < 0.0) return -1;
        }
        return 0;
    };
    double lo = -0.5 * std::log(switch_radius(t)) - 5.0, hi = lo + 10.0;
    int clo = classify(lo), chi = classify(hi);
    if (clo == chi || clo == 0 || chi == 0) throw ConvergenceError("shooting_psi0: no bracket", 0.0, 0);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const int cm = classify(mid);
        if (cm == 0) return mid;
        (cm == clo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Mat2 model_metric_at(const ModelMetricProfile& profile, cplx z) {
    const double r = std::abs(z);
    if (r > profile.r_max) throw RegionError("model_metric_at: |z| beyond the profile mesh");
    const double p = profile.psi_at(r);
    Mat2 H = Mat2::Zero();
    H(0, 0) = std::exp(p);
    H(1, 1) = std::exp(-p);
    return H;
}

}  // namespace sfl
