#include <cmath>

#include "sfl/numerics.hpp"

namespace sfl {

double bessel_I0(double x) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("bessel_I0: argument must be finite and >= 0");
    return std::cyl_bessel_i(0.0, x);
}

double bessel_ratio_bound(double g1, double g2, std::span<const std::pair<double, double>> samples) {
    if (!(g1 > 0.0) || !(g2 > g1)) throw PreconditionError("bessel_ratio_bound: need 0 < g1 < g2");
    double sup = 0.0;
    for (auto [b, a] : samples) {
        if (!(b > 0.0) || b > a) throw PreconditionError("bessel_ratio_bound: need 0 < b <= a");
        // log form keeps I0 overflow out of the ratio
        double lr = std::log(bessel_I0(g1 * a)) - std::log(bessel_I0(g1 * b));
        if (!std::isfinite(lr)) {
            // I0(x) ~ e^x / sqrt(2 pi x) for large x
            auto lI0 = [](double x) { return x - 0.5 * std::log(2.0 * M_PI * x); };
            lr = lI0(g1 * a) - lI0(g1 * b);
        }
        sup = std::max(sup, std::exp(-g2 * (a - b) + lr));
    }
    return sup;
}

}  // namespace sfl
