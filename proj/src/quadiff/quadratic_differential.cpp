#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sfl/quadiff.hpp"
#include "quadiff_detail.hpp"

namespace sfl {

namespace {

constexpr int kSeriesOrder = 40;

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

void trim(std::vector<cplx>& v, double tol) {
    while (!v.empty() && std::abs(v.back()) <= tol) v.pop_back();
}

std::vector<cplx> derivative(const std::vector<cplx>& a) {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < a.size(); ++k) d.push_back(a[k] * static_cast<double>(k));
    return d;
}

// Remainder of a modulo b (b trimmed, nonempty).
std::vector<cplx> poly_mod(std::vector<cplx> a, const std::vector<cplx>& b) {
    const std::size_t nb = b.size();
    while (a.size() >= nb) {
        const cplx f = a.back() / b.back();
        const std::size_t shift = a.size() - nb;
        for (std::size_t j = 0; j < nb; ++j) a[shift + j] -= f * b[j];
        a.pop_back();
    }
    return a;
}

// Degree of gcd(p, p') by the Euclidean algorithm with a relative zero test.
int gcd_degree(const std::vector<cplx>& p) {
    std::vector<cplx> a = p, b = derivative(p);
    trim(b, 0.0);
    if (b.empty()) return 0;
    while (true) {
        const double scale = max_abs(a);
        std::vector<cplx> r = poly_mod(a, b);
        trim(r, 1e-10 * scale);
        if (r.empty()) return static_cast<int>(b.size()) - 1;
        const double rs = max_abs(r);
        for (auto& c : r) c /= rs;
        a = std::move(b);
        b = std::move(r);
    }
}

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double snap(double v, double scale) { return std::abs(v) < 1e-14 * scale ? 0.0 : v; }

}  // namespace

QuadraticDifferential::QuadraticDifferential(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    for (const auto& c : c_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InputError("quadratic differential: non-finite coefficient");
    trim(c_, 0.0);
    if (c_.empty()) throw InputError("quadratic differential: p is identically zero");
}

cplx QuadraticDifferential::p(cplx z) const { return horner(c_, z); }

cplx QuadraticDifferential::dp(cplx z) const { return horner(derivative(c_), z); }

namespace detail {

std::vector<cplx> roots(const std::vector<cplx>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const auto d = derivative(c);
    for (auto& z : r) {
        for (int it = 0; it < 3; ++it) {
            const cplx dpz = horner(d, z);
            if (dpz == cplx(0.0)) break;
            const cplx step = horner(c, z) / dpz;
            if (!std::isfinite(std::abs(step))) break;
            z -= step;
        }
    }
    return r;
}

cplx tracked_sqrt(cplx v, cplx ref) {
    const cplx s = std::sqrt(v);
    return std::abs(s - ref) <= std::abs(s + ref) ? s : -s;
}

}  // namespace detail

cplx Zero::zP(cplx z) const { return coord.evaluate(z - location); }

double Zero::angle_toward(cplx d) const {
    if (d == cplx(0.0)) throw InputError("angle_toward: zero direction");
    double a = std::arg(coord.coeff(1) * d);
    if (a < 0) a += 2 * M_PI;
    double th = 1.5 * a;
    if (th >= 3 * M_PI) th -= 3 * M_PI;
    return th;
}

namespace {

Zero build_zero(const QuadraticDifferential& phi, cplx P, double rho) {
    const int N = kSeriesOrder;
    const PowerSeries shifted = PowerSeries::from_polynomial(phi.coeffs(), P, N);
    std::vector<cplx> qc;
    for (int k = 1; k < N; ++k) qc.push_back(shifted.coeff(k));
    const PowerSeries q(0.0, 0, qc, N - 1);
    const PowerSeries sq = q.pow(0.5);
    std::vector<cplx> sc;
    for (int k = 0; k < N - 1; ++k) sc.push_back(sq.coeff(k) / (k + 1.5));
    // zP^{3/2} = x^{3/2} S(x)
    const PowerSeries S(0.0, 0, sc, N - 1);
    Zero z;
    z.location = P;
    z.coord = PowerSeries::monomial(1.0, 1, N) * S.pow(2.0 / 3.0);
    z.inverse = z.coord.reversion();
    const PowerSeries dcoord = z.coord.derivative();

    for (int attempt = 0; attempt < 12; ++attempt, rho *= 0.5) {
        bool ok = true;
        double flat = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 64 && ok; ++k) {
            const cplx x = std::polar(rho, 2 * M_PI * k / 64.0);
            const cplx zp = z.coord.evaluate(x), dz = dcoord.evaluate(x);
            const cplx pv = phi.p(P + x);
            ok = std::abs(2.25 * zp * dz * dz - pv) < 1e-12 * std::max(1.0, std::abs(pv)) &&
                 std::abs(z.inverse.evaluate(zp) - x) < 1e-12 * std::max(1.0, rho);
            flat = std::min(flat, std::pow(std::abs(zp), 1.5));
        }
        if (ok) {
            z.radius = rho;
            z.flat_radius = 0.999 * flat;
            return z;
        }
    }
    throw NumericalError("zeros: local coordinate series failed to converge");
}

}  // namespace

std::vector<Zero> zeros(const QuadraticDifferential& phi) {
    const auto& c = phi.coeffs();
    if (c.size() <= 1) return {};
    if (gcd_degree(c) > 0) throw DomainError("zeros: non-simple zero (gcd(p, p') is not constant)");
    auto r = detail::roots(c);
    double scale = 1.0;
    for (const auto& z : r) scale = std::max(scale, std::abs(z));
    for (auto& z : r) z = cplx(snap(z.real(), scale), snap(z.imag(), scale));
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<Zero> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(phi.dp(r[i])) == 0.0) throw DomainError("zeros: non-simple zero");
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < r.size(); ++j)
            if (j != i) dmin = std::min(dmin, std::abs(r[i] - r[j]));
        out.push_back(build_zero(phi, r[i], std::isfinite(dmin) ? 0.25 * dmin : 1.0));
    }
    return out;
}

double flat_length(const QuadraticDifferential& phi, std::span<const cplx> path) {
    if (path.size() < 2) throw InputError("flat_length: path needs at least two points");
    const auto rts = detail::roots(phi.coeffs());
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const cplx a = path[k], b = path[k + 1];
        if (a == b) throw InputError("flat_length: repeated point in path");
        if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b)))
            throw InputError("flat_length: non-finite point");
        // split where the segment runs through a zero so singularities sit at endpoints
        std::vector<double> cuts{0.0, 1.0};
        for (const auto& r : rts) {
            const cplx t = (r - a) / (b - a);
            if (t.real() > 1e-14 && t.real() < 1 - 1e-14 && std::abs(t.imag()) < 1e-12) cuts.push_back(t.real());
        }
        std::sort(cuts.begin(), cuts.end());
        const double len = std::abs(b - a);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            auto f = [&](double t) { return std::sqrt(std::abs(phi.p(a + (b - a) * t))); };
            total += len * ts.integrate(f, cuts[j], cuts[j + 1], 1e-13);
        }
    }
    return total;
}

double distance_from_zero(const QuadraticDifferential& phi, const Zero& P, cplx z,
                          double certified_radius) {
    const cplx dz = z - P.location;
    if (dz == cplx(0.0)) return 0.0;
    for (const auto& r : detail::roots(phi.coeffs())) {
        if (std::abs(r - P.location) < 1e-12 * (1 + std::abs(r))) continue;
        const cplx t = (r - P.location) / dz;
        if (t.real() > 0 && t.real() <= 1 && std::abs(t.imag()) < 1e-12)
            throw RegionError("distance_from_zero: segment runs through another zero");
    }
    // p(zeta) = (zeta - P) q(zeta); deflate p to get q exactly
    const auto& c = phi.coeffs();
    std::vector<cplx> q(c.size() - 1);
    cplx carry = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        carry = c[k] + carry * P.location;
        q[k - 1] = carry;
    }
    // zeta = P + dz u^2: int = dz^{3/2} int_0^1 2 u^2 sqrt(q(zeta)) du with a continuous branch
    constexpr int M = 2048;
    std::vector<cplx> ref(M + 1);
    ref[0] = std::sqrt(horner(q, P.location));
    for (int j = 1; j <= M; ++j) {
        const double u = static_cast<double>(j) / M;
        ref[j] = detail::tracked_sqrt(horner(q, P.location + dz * u * u), ref[j - 1]);
    }
    auto g = [&](double u) {
        const int j = std::clamp(static_cast<int>(std::lround(u * M)), 0, M);
        return 2 * u * u * detail::tracked_sqrt(horner(q, P.location + dz * u * u), ref[j]);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double re = GK::integrate([&](double u) { return g(u).real(); }, 0.0, 1.0, 15, 1e-14);
    const double im = GK::integrate([&](double u) { return g(u).imag(); }, 0.0, 1.0, 15, 1e-14);
    const double d = std::pow(std::abs(dz), 1.5) * std::abs(cplx(re, im));
    if (!(d < certified_radius))
        throw RegionError("distance_from_zero: point lies outside the certified disc");
    return d;
}

}  // namespace sfl
