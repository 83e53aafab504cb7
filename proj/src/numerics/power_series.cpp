#include <algorithm>
#include <cmath>
#include <limits>

#include "sfl/numerics.hpp"

namespace sfl {

PowerSeries::PowerSeries(cplx center, int low, std::vector<cplx> coeffs, int order)
    : center_(center), low_(low), c_(std::move(coeffs)), order_(order) {
    const int n = std::max(0, order_ - low_);
    c_.resize(static_cast<std::size_t>(n), cplx(0.0));
}

PowerSeries PowerSeries::monomial(cplx coeff, int power, int order, cplx center) {
    return PowerSeries(center, power, {coeff}, order);
}

PowerSeries PowerSeries::constant(cplx c, int order, cplx center) {
    return PowerSeries(center, 0, {c}, order);
}

PowerSeries PowerSeries::from_polynomial(std::span<const cplx> poly, cplx center, int order) {
    // repeated synthetic division gives the Taylor coefficients at `center`
    std::vector<cplx> a(poly.begin(), poly.end());
    std::vector<cplx> out;
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = n - 1; j > k; --j) a[j - 1] += center * a[j];
        out.push_back(a[k]);
    }
    return PowerSeries(center, 0, std::move(out), order);
}

cplx PowerSeries::coeff(int k) const {
    if (k >= order_) throw PreconditionError("PowerSeries::coeff: power beyond truncation order");
    if (k < low_) return 0.0;
    return c_[static_cast<std::size_t>(k - low_)];
}

int PowerSeries::valuation() const {
    for (std::size_t j = 0; j < c_.size(); ++j)
        if (c_[j] != cplx(0.0)) return low_ + static_cast<int>(j);
    return order_;
}

void PowerSeries::check_compatible(const PowerSeries& o) const {
    if (std::abs(center_ - o.center_) > 1e-14 * (1.0 + std::abs(center_)))
        throw PreconditionError("PowerSeries: centers differ");
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
    check_compatible(o);
    const int lo = std::min(low_, o.low_);
    const int ord = std::min(order_, o.order_);
    std::vector<cplx> c(static_cast<std::size_t>(std::max(0, ord - lo)));
    for (int k = lo; k < ord; ++k) c[static_cast<std::size_t>(k - lo)] = coeff(k) + o.coeff(k);
    return PowerSeries(center_, lo, std::move(c), ord);
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + (-o); }

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
    check_compatible(o);
    const int va = valuation(), vb = o.valuation();
    const int ord = std::min(order_ + vb, o.order_ + va);
    const int lo = low_ + o.low_;
    std::vector<cplx> c(static_cast<std::size_t>(std::max(0, ord - lo)));
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == cplx(0.0)) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) {
            const std::size_t k = i + j;
            if (k >= c.size()) break;
            c[k] += c_[i] * o.c_[j];
        }
    }
    return PowerSeries(center_, lo, std::move(c), ord);
}

PowerSeries PowerSeries::operator*(cplx s) const {
    PowerSeries r = *this;
    for (auto& x : r.c_) x *= s;
    return r;
}

PowerSeries operator*(cplx s, const PowerSeries& p) { return p * s; }

PowerSeries PowerSeries::derivative() const {
    std::vector<cplx> c(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) c[j] = c_[j] * static_cast<double>(low_ + static_cast<int>(j));
    return PowerSeries(center_, low_ - 1, std::move(c), order_ - 1);
}

PowerSeries PowerSeries::integrate() const {
    std::vector<cplx> c(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) {
        const int k = low_ + static_cast<int>(j);
        if (k == -1) {
            if (c_[j] != cplx(0.0)) throw PreconditionError("PowerSeries::integrate: residue term present");
            continue;
        }
        c[j] = c_[j] / static_cast<double>(k + 1);
    }
    return PowerSeries(center_, low_ + 1, std::move(c), order_ + 1);
}

PowerSeries PowerSeries::pow(double s) const {
    const int v = valuation();
    if (v >= order_) throw PreconditionError("PowerSeries::pow: series is zero to its order");
    const double vs = v * s;
    if (std::abs(vs - std::round(vs)) > 1e-12)
        throw PreconditionError("PowerSeries::pow: non-integral leading power");
    const cplx lead = coeff(v);
    const int n = order_ - v;
    std::vector<cplx> u(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k)] = coeff(v + k) / lead;
    // (1 + w)^s by the recurrence n b_n = sum_k (k s - (n - k)) u_k b_{n-k}
    std::vector<cplx> b(static_cast<std::size_t>(n));
    b[0] = 1.0;
    for (int m = 1; m < n; ++m) {
        cplx acc = 0.0;
        for (int k = 1; k <= m; ++k)
            acc += (k * s - (m - k)) * u[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(m - k)];
        b[static_cast<std::size_t>(m)] = acc / static_cast<double>(m);
    }
    const cplx ls = std::pow(lead, s);
    for (auto& x : b) x *= ls;
    const int lo = static_cast<int>(std::lround(vs));
    return PowerSeries(center_, lo, std::move(b), lo + n);
}

PowerSeries PowerSeries::inverse() const { return pow(-1.0); }

PowerSeries PowerSeries::compose(const PowerSeries& g) const {
    const PowerSeries y = g - PowerSeries::constant(center_, g.order(), g.center());
    const int vy = y.valuation();
    if (vy < 1) throw PreconditionError("PowerSeries::compose: inner series does not vanish at the centre");
    const int cap = order_ >= 0 ? order_ * vy : std::numeric_limits<int>::max() / 4;
    PowerSeries acc = PowerSeries::constant(0.0, cap, g.center());
    PowerSeries ypow = PowerSeries::constant(1.0, cap, g.center());
    PowerSeries yinv;
    if (low_ < 0) yinv = y.inverse();
    for (int k = 0; k < order_; ++k) {
        if (k >= low_) {
            const cplx ck = coeff(k);
            if (ck != cplx(0.0)) {
                acc = acc + ypow * ck;
            }
        }
        ypow = ypow * y;
    }
    if (low_ < 0) {
        PowerSeries np = yinv;
        for (int k = -1; k >= low_; --k) {
            const cplx ck = coeff(k);
            if (ck != cplx(0.0)) {
                acc = acc + np * ck;
            }
            np = np * yinv;
        }
    }
    return acc;
}

PowerSeries PowerSeries::reversion() const {
    if (low_ < 0) throw PreconditionError("PowerSeries::reversion: Laurent series");
    if (coeff(0) != cplx(0.0) || valuation() != 1)
        throw PreconditionError("PowerSeries::reversion: need a simple zero at the centre");
    const int n = order_;
    const cplx a1 = coeff(1);
    std::vector<cplx> b(static_cast<std::size_t>(n), cplx(0.0));
    b[0] = center_;
    b[1] = 1.0 / a1;
    for (int m = 2; m < n; ++m) {
        PowerSeries g(0.0, 0, b, m + 1);
        const cplx e = compose(g).coeff(m);
        b[static_cast<std::size_t>(m)] = -e / a1;
    }
    return PowerSeries(0.0, 0, std::move(b), n);
}

PowerSeries PowerSeries::substitute_scale(cplx w) const {
    PowerSeries r = *this;
    cplx wk = std::pow(w, low_);
    for (auto& x : r.c_) {
        x *= wk;
        wk *= w;
    }
    return r;
}

PowerSeries PowerSeries::truncated(int order) const {
    if (order > order_) throw PreconditionError("PowerSeries::truncated: cannot extend the order");
    std::vector<cplx> c(c_.begin(), c_.begin() + std::max(0, std::min<int>(static_cast<int>(c_.size()), order - low_)));
    return PowerSeries(center_, low_, std::move(c), order);
}

cplx PowerSeries::evaluate(cplx x) const {
    const cplx s = x - center_;
    cplx acc = 0.0;
    for (std::size_t j = c_.size(); j-- > 0;) acc = acc * s + c_[j];
    return acc * std::pow(s, low_);
}

}  // namespace sfl
