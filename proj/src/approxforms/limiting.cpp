#include <cmath>

#include "sfl/approxforms.hpp"

namespace sfl {

Mat2 global_higgs(const QuadraticDifferential& phi, cplx z) {
    Mat2 T;
    T << 0.0, phi.p(z), 1.0, 0.0;
    return T;
}

Mat2 limiting_metric(const QuadraticDifferential& phi, cplx z) {
    const double a = std::abs(phi.p(z));
    if (!(a > 0.0)) throw DomainError("limiting_metric: singular at a zero");
    const double s = std::sqrt(a);
    Mat2 H = Mat2::Zero();
    H(0, 0) = 1.0 / s;
    H(1, 1) = s;
    return H;
}

Mat2 sheet_frame(cplx xi) {
    Mat2 S;
    S << xi, -xi, 1.0, 1.0;
    return S;
}

Mat2 gram_in_frame(const Mat2& H, const Mat2& S) { return S.transpose() * H * S.conjugate(); }

Mat2 F_alpha(const QuadraticDifferential& phi, const std::function<cplx(cplx, cplx)>& alpha, cplx z) {
    const cplx p = phi.p(z);
    if (p == cplx(0.0)) throw FrameError("F_alpha: the sheet frame degenerates at a zero");
    const cplx xi = std::sqrt(p);
    const cplx ap = alpha(z, xi), am = alpha(z, -xi);
    return 0.5 * (ap + am) * Mat2::Identity() + (0.5 * (ap - am) / xi) * global_higgs(phi, z);
}

// ---------------------------------------------------------------------------

CutoffSchedule CutoffSchedule::from_threshold(double M, double kappa) {
    const double k0 = 0.5 * M;
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw ScheduleError("cutoff: threshold must be positive and finite");
    if (!(kappa > 0.0 && kappa < k0)) throw ScheduleError("cutoff: kappa must lie in (0, M/2)");
    return {k0, kappa, std::min((k0 - kappa) / 10.0, kappa / 20.0)};
}

namespace {

/// Smooth step s(x) = 1 / (1 + exp(1/x - 1/(1-x))) on (0, 1) and its derivative.
std::pair<double, double> step(double x) {
    if (x <= 0.0) return {0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0};
    const double e = 1.0 / x - 1.0 / (1.0 - x);
    if (e > 700.0) return {0.0, 0.0};
    if (e < -700.0) return {1.0, 0.0};
    const double s = 1.0 / (1.0 + std::exp(e));
    return {s, s * (1.0 - s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)))};
}

}  // namespace

double CutoffSchedule::chi(double d) const { return step((outer() - d) / delta).first; }

double CutoffSchedule::dchi(double d) const { return -step((outer() - d) / delta).second / delta; }

}  // namespace sfl
