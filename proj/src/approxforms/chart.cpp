#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "sfl/approxforms.hpp"
#include "../quadiff/quadiff_detail.hpp"

namespace sfl {

namespace {

cplx nearest_root(cplx v, cplx ref, int n) {
    // n-th roots of v closest to ref
    const double m = std::pow(std::abs(v), 1.0 / n);
    const double a = std::arg(v) / n;
    cplx best = std::polar(m, a);
    for (int k = 1; k < n; ++k) {
        const cplx c = std::polar(m, a + 2 * M_PI * k / n);
        if (std::abs(c - ref) < std::abs(best - ref)) best = c;
    }
    return best;
}

}  // namespace

ZeroChart::ZeroChart(const QuadraticDifferential& phi, const Zero& P, double flat_radius,
                     std::vector<HolDifferential> forms)
    : phi_(phi), P_(P), R_(flat_radius), rho_max_(std::pow(flat_radius, 2.0 / 3.0)),
      rho_series_(std::min(0.5 * std::pow(P.flat_radius, 2.0 / 3.0), std::pow(flat_radius, 2.0 / 3.0))),
      forms_(std::move(forms)) {
    if (!(flat_radius > 0.0)) throw PreconditionError("ZeroChart: flat radius must be positive");
    dz_ = P_.inverse.derivative();
    const int N = P_.inverse.order();
    for (const auto& f : forms_) {
        // alpha1 = (4/9) sum_k c_k zeta^k / (k + 1/2) with q(z(zeta)) (dz/dzeta)^2 = sum_k c_k zeta^k
        const PowerSeries shifted = PowerSeries::from_polynomial(f.q, P_.location, N);
        std::vector<cplx> qc;
        for (int k = 0; k < N; ++k) qc.push_back(shifted.coeff(k));
        const PowerSeries q = PowerSeries(0.0, 0, qc, N).compose(P_.inverse);
        const PowerSeries Q = q * dz_ * dz_;
        std::vector<cplx> c;
        for (int k = 0; k < Q.order(); ++k) c.push_back(4.0 / 9.0 * Q.coeff(k) / (k + 0.5));
        alpha1_.emplace_back(0.0, 0, c, Q.order());
    }
}

ChartPoint ZeroChart::series_point(cplx zeta) const {
    ChartPoint p;
    p.zeta = zeta;
    p.z = P_.location + P_.inverse.evaluate(zeta);
    p.dz = dz_.evaluate(zeta);
    const cplx pz = phi_.p(p.z);
    for (std::size_t k = 0; k < forms_.size(); ++k) {
        p.alpha1.push_back(alpha1_[k].evaluate(zeta));
        p.g1.push_back(forms_[k].numerator(p.z) / pz);
    }
    return p;
}

std::vector<ChartPoint> ZeroChart::ray(double arg, std::span<const double> rho) const {
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (rho[k] < 0 || rho[k] > rho_max_ * (1 + 1e-12))
            throw RegionError("ZeroChart: radius outside the chart");
        if (k > 0 && rho[k] < rho[k - 1]) throw InputError("ZeroChart: radii must be increasing");
    }
    std::vector<ChartPoint> out;
    out.reserve(rho.size());
    const cplx dir = std::polar(1.0, arg);
    std::size_t k = 0;
    for (; k < rho.size() && rho[k] <= rho_series_; ++k) out.push_back(series_point(rho[k] * dir));
    if (k == rho.size()) return out;

    // State: z, dz/dzeta, then alpha = alpha1 xi_P per form, as (re, im) pairs.
    namespace ode = boost::numeric::odeint;
    using State = std::vector<double>;
    const std::size_t nf = forms_.size();
    const cplx half = std::polar(1.0, 0.5 * arg);  // xi_P = (3/2) rho^{1/2} e^{i arg / 2}
    const auto get = [](const State& s, std::size_t i) { return cplx(s[2 * i], s[2 * i + 1]); };
    const auto put = [](State& s, std::size_t i, cplx v) {
        s[2 * i] = v.real();
        s[2 * i + 1] = v.imag();
    };
    const auto rhs = [&](const State& s, State& ds, double r) {
        const cplx z = get(s, 0), w = get(s, 1);
        const cplx pz = phi_.p(z), dp = phi_.dp(z);
        // (dz/dzeta)^2 p(z) = (9/4) zeta differentiated in zeta
        const cplx w2 = (2.25 - w * w * w * dp) / (2.0 * w * pz);
        put(ds, 0, w * dir);
        put(ds, 1, w2 * dir);
        const cplx xi = 1.5 * std::sqrt(r) * half;
        for (std::size_t j = 0; j < nf; ++j) put(ds, 2 + j, forms_[j].numerator(z) * w * w * dir / xi);
    };
    State s(2 * (2 + nf));
    const ChartPoint start = series_point(rho_series_ * dir);
    put(s, 0, start.z);
    put(s, 1, start.dz);
    const cplx xi0 = 1.5 * std::sqrt(rho_series_) * half;
    for (std::size_t j = 0; j < nf; ++j) put(s, 2 + j, start.alpha1[j] * xi0);

    std::vector<double> times{rho_series_};
    for (std::size_t j = k; j < rho.size(); ++j) times.push_back(std::max(rho[j], rho_series_));
    std::vector<State> states;
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), 1e-3 * rho_max_,
                         [&](const State& x, double) { states.push_back(x); });
    for (std::size_t j = 1; j < states.size(); ++j) {
        const double r = times[j];
        ChartPoint p;
        p.zeta = r * dir;
        p.z = get(states[j], 0);
        p.dz = get(states[j], 1);
        const cplx xi = 1.5 * std::sqrt(r) * half;
        const cplx pz = phi_.p(p.z);
        if (!std::isfinite(std::abs(p.z)) || pz == cplx(0.0))
            throw ScheduleError("ZeroChart: ray ran into another zero");
        for (std::size_t jf = 0; jf < nf; ++jf) {
            p.alpha1.push_back(get(states[j], 2 + jf) / xi);
            p.g1.push_back(forms_[jf].numerator(p.z) / pz);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::pair<cplx, cplx> ZeroChart::zeta_of(cplx z) const {
    const cplx d = z - P_.location;
    if (d == cplx(0.0)) return {0.0, 1.0 / dz_.coeff(0)};
    // p(P + x) = x r(x); along x = u^2 d, p^{1/2} = u d^{1/2} sigma(u) with sigma^2 = r(u^2 d).
    const auto r = [&](cplx x) { return x == cplx(0.0) ? phi_.dp(P_.location) : phi_.p(P_.location + x) / x; };
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    const int panels = 40;
    cplx sigma = std::sqrt(r(0.0));
    cplx I = 0.0;                               // int_0^u 2 s^2 sigma(s) ds
    cplx root = P_.coord.coeff(1);              // (I^2 / u^6)^{1/3} -> zeta / (u^2 d)
    for (int k = 0; k < panels; ++k) {
        const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        // nodes in increasing order for the sqrt tracking
        std::array<double, 10> nodes{};
        std::array<double, 10> weights{};
        std::size_t n = 0;
        for (std::size_t j = xs.size(); j-- > 1;) {
            nodes[n] = m - h * xs[j];
            weights[n++] = ws[j];
        }
        if (xs[0] == 0.0) {
            nodes[n] = m;
            weights[n++] = ws[0];
        } else {
            nodes[n] = m - h * xs[0];
            weights[n++] = ws[0];
            nodes[n] = m + h * xs[0];
            weights[n++] = ws[0];
        }
        for (std::size_t j = 1; j < xs.size(); ++j) {
            nodes[n] = m + h * xs[j];
            weights[n++] = ws[j];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double u = nodes[j];
            sigma = detail::tracked_sqrt(r(u * u * d), sigma);
            I += h * weights[j] * 2.0 * u * u * sigma;
        }
        sigma = detail::tracked_sqrt(r(b * b * d), sigma);
        const double b6 = std::pow(b, 6);
        root = nearest_root(I * I / b6, root, 3);
    }
    const cplx zeta = d * root;
    const cplx dzeta = 2.0 * d * d * I * sigma / (3.0 * zeta * zeta);
    return {zeta, dzeta};
}

}  // namespace sfl
