#include <cmath>

#include "sfl/numerics.hpp"

namespace sfl {

ClosedPath ClosedPath::circle(cplx center, double radius, std::size_t n) {
    ClosedPath p;
    p.z.resize(n);
    p.dz_ds.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        cplx e = std::polar(1.0, s);
        p.z[k] = center + radius * e;
        p.dz_ds[k] = cplx(0.0, radius) * e;
    }
    return p;
}

ContourResult contour_integrate(const ClosedPath& path, const std::function<cplx(cplx)>& f) {
    const std::size_t n = path.z.size();
    if (n < 4 || path.dz_ds.size() != n) throw InputError("contour_integrate: malformed path");
    cplx full = 0.0, half = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cplx v = f(path.z[k]);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("contour_integrate: integrand not finite on the path");
        cplx term = v * path.dz_ds[k];
        full += term;
        if (k % 2 == 0) half += term;
    }
    const double ds = 2.0 * M_PI / static_cast<double>(n);
    ContourResult r;
    r.value = full * ds;
    r.error = (n % 2 == 0) ? std::abs(r.value - half * (2.0 * ds)) : 0.0;
    return r;
}

}  // namespace sfl
