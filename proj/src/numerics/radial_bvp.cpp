#include <algorithm>
#include <cmath>

#include "sfl/numerics.hpp"

namespace sfl {

std::vector<double> thomas_solve(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                 std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

namespace {

std::size_t locate(const std::vector<double>& r, double x) {
    if (x < r.front() || x > r.back() || !std::isfinite(x))
        throw RegionError("RadialProfile: radius outside the mesh");
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = static_cast<std::size_t>(it - r.begin());
    return std::min(std::max<std::size_t>(k, 1), r.size() - 1) - 1;
}

}  // namespace

double RadialProfile::value(double x) const {
    const std::size_t k = locate(r, x);
    const double h = r[k + 1] - r[k], s = (x - r[k]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u[k] + h10 * h * du[k] + h01 * u[k + 1] + h11 * h * du[k + 1];
}

double RadialProfile::derivative(double x) const {
    const std::size_t k = locate(r, x);
    const double h = r[k + 1] - r[k], s = (x - r[k]) / h;
    const double d00 = 6 * s * (s - 1), d10 = (1 - s) * (1 - 3 * s);
    const double d01 = -6 * s * (s - 1), d11 = s * (3 * s - 2);
    return (d00 * u[k] + d01 * u[k + 1]) / h + d10 * du[k] + d11 * du[k + 1];
}

RadialProfile solve_radial_bvp(const RadialRhs& rhs, double r_max, double outer_value, const RadialOptions& opt,
                               RadialReport* report) {
    if (!(r_max > 0.0) || !std::isfinite(outer_value)) throw PreconditionError("solve_radial_bvp: bad domain");
    if (opt.cells < 4) throw PreconditionError("solve_radial_bvp: too few cells");
    const std::size_t N = opt.cells;
    const double h = r_max / static_cast<double>(N);
    std::vector<double> r(N + 1), u(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        r[i] = static_cast<double>(i) * h;
        u[i] = opt.initial ? opt.initial(r[i]) : outer_value;
    }
    u[N] = outer_value;
    auto fu = [&](double x, double v) {
        if (rhs.dfdu) return rhs.dfdu(x, v);
        const double e = 1e-7 * std::max(1.0, std::abs(v));
        return (rhs.f(x, v + e) - rhs.f(x, v - e)) / (2 * e);
    };
    // control-volume residual of (r u')' = r f over [r_{i-1/2}, r_{i+1/2}]
    auto resid = [&](const std::vector<double>& v, std::vector<double>& F) {
        F.assign(N, 0.0);
        F[0] = 0.5 * (v[1] - v[0]) - h * h / 8.0 * rhs.f(0.0, v[0]);
        for (std::size_t i = 1; i < N; ++i) {
            const double rp = r[i] + 0.5 * h, rm = r[i] - 0.5 * h;
            F[i] = (rp * (v[i + 1] - v[i]) - rm * (v[i] - v[i - 1])) / h - r[i] * h * rhs.f(r[i], v[i]);
        }
    };
    // residual relative to the largest flux r u' on the mesh
    auto maxabs = [&](const std::vector<double>& F, const std::vector<double>& v) {
        double m = 0.0, s = 1.0;
        for (std::size_t i = 0; i < N; ++i) s = std::max(s, std::abs((r[i] + 0.5 * h) * (v[i + 1] - v[i]) / h));
        for (double x : F) m = std::isfinite(x) ? std::max(m, std::abs(x)) : INFINITY;
        return m / s;
    };
    auto n2 = [](const std::vector<double>& F) {
        double m = 0.0;
        for (double x : F) m += x * x;
        return std::sqrt(m);
    };

    std::vector<double> F, Ft, ut;
    resid(u, F);
    double rmax = maxabs(F, u);
    int it = 0, polish = 0;
    for (; it < opt.max_iter; ++it) {
        if (rmax <= opt.tol) {
            if (polish >= 2) break;
            ++polish;
        }
        std::vector<double> a(N, 0.0), b(N), c(N, 0.0), d(N);
        b[0] = -0.5 - h * h / 8.0 * fu(0.0, u[0]);
        c[0] = 0.5;
        for (std::size_t i = 1; i < N; ++i) {
            const double rp = r[i] + 0.5 * h, rm = r[i] - 0.5 * h;
            a[i] = rm / h;
            b[i] = -(rp + rm) / h - r[i] * h * fu(r[i], u[i]);
            c[i] = rp / h;
        }
        for (std::size_t i = 0; i < N; ++i) d[i] = -F[i];
        const std::vector<double> du = thomas_solve(a, b, c, d);
        const double n0 = n2(F);
        double lambda = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
            ut = u;
            for (std::size_t i = 0; i < N; ++i) ut[i] += lambda * du[i];
            resid(ut, Ft);
            if (maxabs(Ft, ut) < INFINITY && n2(Ft) < n0) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            if (rmax <= opt.tol) break;
            throw ConvergenceError("solve_radial_bvp: line search stalled", rmax, it + 1);
        }
        const double prev = rmax;
        u.swap(ut);
        F.swap(Ft);
        rmax = maxabs(F, u);
        if (prev <= opt.tol && rmax > 0.1 * prev) break;
    }
    if (rmax > opt.tol) throw ConvergenceError("solve_radial_bvp: no convergence", rmax, it);

    RadialProfile p;
    p.r = r;
    p.u = u;
    p.du.assign(N + 1, 0.0);
    for (std::size_t i = 1; i < N; ++i) p.du[i] = (u[i + 1] - u[i - 1]) / (2 * h);
    p.du[N] = (3 * u[N] - 4 * u[N - 1] + u[N - 2]) / (2 * h);
    if (report) {
        report->iterations = it;
        report->residual = rmax;
        double pw = std::abs(F[0]) / (h * h / 8.0);
        for (std::size_t i = 1; i < N; ++i) pw = std::max(pw, std::abs(F[i]) / (r[i] * h));
        report->pointwise = pw;
    }
    return p;
}

}  // namespace sfl
