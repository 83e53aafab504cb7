#include <cmath>

#include "sfl/numerics.hpp"

namespace sfl {

DecayFit fit_decay_rate(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw InputError("fit_decay_rate: need at least 3 samples");
    const double n = static_cast<double>(samples.size());
    double md = 0.0, my = 0.0;
    for (auto [d, v] : samples) {
        if (!(v > 0.0) || !std::isfinite(v) || !std::isfinite(d))
            throw InputError("fit_decay_rate: values must be positive and finite");
        md += d;
        my += -std::log(v);
    }
    md /= n;
    my /= n;
    double sdd = 0.0, sdy = 0.0;
    for (auto [d, v] : samples) {
        sdd += (d - md) * (d - md);
        sdy += (d - md) * (-std::log(v) - my);
    }
    if (!(sdd > 0.0)) throw InputError("fit_decay_rate: distances are all equal");
    DecayFit fit;
    fit.rate = sdy / sdd;
    fit.intercept = my - fit.rate * md;
    double ss = 0.0;
    for (auto [d, v] : samples) {
        double e = -std::log(v) - (fit.intercept + fit.rate * d);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.count = samples.size();
    return fit;
}

}  // namespace sfl
