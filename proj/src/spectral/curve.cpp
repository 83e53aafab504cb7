#include <algorithm>
#include <cmath>

#include "sfl/spectral.hpp"

namespace sfl {

namespace {

const cplx kOmega = std::polar(1.0, 2 * M_PI / 3);

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Proper intersection of [a, b] with [c, d].
bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

SpectralCurve::SpectralCurve(QuadraticDifferential p) : phi_(std::move(p)) {
    zeros_ = zeros(phi_);
    const int n = phi_.degree();
    genus_ = n >= 1 ? (n - 1) / 2 : 0;
    rotation_.assign(zeros_.size(), 0);

    for (std::size_t i = 0; i + 1 < zeros_.size(); i += 2)
        cuts_.push_back({zeros_[i].location, zeros_[i + 1].location, false});
    if (zeros_.size() % 2 == 1) {
        cplx centroid = 0.0;
        for (const auto& z : zeros_) centroid += z.location;
        centroid /= static_cast<double>(zeros_.size());
        const cplx a = zeros_.back().location;
        cplx dir = a - centroid;
        dir = std::abs(dir) > 1e-12 ? dir / std::abs(dir) : cplx(1.0);
        double extent = 1.0;
        for (const auto& z : zeros_) extent = std::max(extent, 4 * std::abs(z.location - a));
        bool placed = false;
        for (int k = 0; k < 64 && !placed; ++k) {
            // try directions alternating around the outward one
            const double turn = (k % 2 ? 1 : -1) * M_PI * ((k + 1) / 2) / 32.0;
            const cplx d = dir * std::polar(1.0, turn);
            const cplx far = a + extent * d;
            placed = std::none_of(cuts_.begin(), cuts_.end(),
                                  [&](const Cut& c) { return segments_cross(a, far, c.a, c.b); });
            if (placed) cuts_.push_back({a, far, true});
        }
        if (!placed) throw DomainError("spectral curve: no ray cut avoids the finite cuts");
    }
    for (std::size_t i = 0; i < cuts_.size(); ++i)
        for (std::size_t j = i + 1; j < cuts_.size(); ++j)
            if (segments_cross(cuts_[i].a, cuts_[i].b, cuts_[j].a, cuts_[j].b))
                throw DomainError("spectral curve: branch cuts intersect");
}

cplx SpectralCurve::sheet_value(cplx z) const {
    cplx v = std::sqrt(phi_.coeffs().back());
    for (const auto& c : cuts_) {
        if (!c.infinite) {
            v *= (z - c.a) * std::sqrt((z - c.b) / (z - c.a));
        } else {
            const cplx d = (c.b - c.a) / std::abs(c.b - c.a);
            // sqrt(-(z - a)/d) is cut along a + d [0, inf); its square times -d is z - a
            v *= std::sqrt(-d) * std::sqrt(-(z - c.a) / d);
        }
    }
    return v;
}

int SpectralCurve::cut_crossings(cplx a, cplx b) const {
    int n = 0;
    for (const auto& c : cuts_) {
        cplx end = c.b;
        if (c.infinite) {
            const double reach = std::abs(a - c.a) + std::abs(b - c.a) + std::abs(c.b - c.a);
            end = c.a + (c.b - c.a) / std::abs(c.b - c.a) * (2 * reach);
        }
        if (segments_cross(a, b, c.a, end)) ++n;
    }
    return n;
}

void SpectralCurve::rotate_coordinate(std::size_t i, int k) { rotation_.at(i) = ((k % 3) + 3) % 3; }

cplx SpectralCurve::zP(std::size_t i, cplx z) const {
    return std::pow(kOmega, rotation_.at(i)) * zeros_.at(i).zP(z);
}

PowerSeries SpectralCurve::z_of_xi(std::size_t i, int order) const {
    // zP = (4/9) xi^2 in the rotated coordinate; the stored series is in omega^{-k} zP
    const cplx scale = (4.0 / 9.0) * std::pow(kOmega, -rotation_.at(i));
    const PowerSeries g = PowerSeries::monomial(scale, 2, order + 2);
    return zeros_.at(i).inverse.compose(g).truncated(order);
}

cplx HolDifferential::numerator(cplx z) const {
    cplx acc = 0.0;
    for (auto it = q.rbegin(); it != q.rend(); ++it) acc = acc * z + *it;
    return acc;
}

HolDifferential HolDifferential::monomial(int k) {
    HolDifferential h;
    h.q.assign(static_cast<std::size_t>(k + 1), 0.0);
    h.q.back() = 1.0;
    return h;
}

std::vector<HolDifferential> canonical_basis(const SpectralCurve& curve) {
    std::vector<HolDifferential> b;
    for (int k = 0; k < curve.genus(); ++k) b.push_back(HolDifferential::monomial(k));
    return b;
}

PowerSeries local_expansion(const SpectralCurve& curve, const HolDifferential& nu, std::size_t i, int order) {
    const int N = order + 4;
    const PowerSeries x = curve.z_of_xi(i, N);
    const PowerSeries dx = x.derivative();
    const cplx P = curve.branch_points().at(i).location;
    const PowerSeries shifted = PowerSeries::from_polynomial(nu.q, P, N);
    std::vector<cplx> c;
    for (int k = 0; k < N; ++k) c.push_back(shifted.coeff(k));
    const PowerSeries qx = PowerSeries(0.0, 0, c, N).compose(x);
    // xi = xi_P (8/9) xi_P / x', so dz / xi = (9/8) x'^2 xi_P^{-2} d xi_P
    const PowerSeries n = qx * dx * dx * PowerSeries::monomial(9.0 / 8.0, -2, 4 * N);
    return n.truncated(order);
}

}  // namespace sfl
