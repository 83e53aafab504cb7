#include <cmath>

#include "sfl/approxforms.hpp"

namespace sfl {

namespace {

constexpr double kC = 1.5;  // f = [[0, c zeta], [c, 0]]

}  // namespace

Mat2 SplitEnd::matrix(cplx zeta) const {
    const cplx X0 = x0 + dx0, X1 = x1 + dx1;
    Mat2 m;
    m << X0 + y0, (X1 + y1) * kC * zeta, (X1 - y1) * kC, X0 - y0;
    return m;
}

SplitEnd SplitEnd::of(const Mat2& X, cplx zeta) {
    if (zeta == cplx(0.0)) throw DomainError("SplitEnd: f is nilpotent at zeta = 0");
    SplitEnd s;
    s.dx0 = 0.5 * (X(0, 0) + X(1, 1));
    s.y0 = 0.5 * (X(0, 0) - X(1, 1));
    const cplx a = X(0, 1) / (kC * zeta), b = X(1, 0) / kC;
    s.dx1 = 0.5 * (a + b);
    s.y1 = 0.5 * (a - b);
    return s;
}

Mat2 SplitEnd::commuting(cplx zeta) const {
    SplitEnd c;
    c.x0 = x0 + dx0;
    c.x1 = x1 + dx1;
    return c.matrix(zeta);
}

FormValue to_matrices(const SplitForm& f, cplx zeta) { return {f.dz.matrix(zeta), f.dzbar.matrix(zeta)}; }

// Gram matrix of (id, s3) is 2 I; of (f, s3 f) it is 2 c^2 r [[cosh 2w, sinh 2w], [sinh 2w, cosh 2w]];
// the two blocks are orthogonal.
cplx split_trace(const SplitEnd& X, const SplitEnd& Y, double r, double w) {
    const cplx X0 = X.x0 + X.dx0, X1 = X.x1 + X.dx1, Y0 = Y.x0 + Y.dx0, Y1 = Y.x1 + Y.dx1;
    const double c2 = std::cosh(2 * w), s2 = std::sinh(2 * w);
    return 2.0 * (X0 * std::conj(Y0) + X.y0 * std::conj(Y.y0)) +
           2 * kC * kC * r *
               (c2 * (X1 * std::conj(Y1) + X.y1 * std::conj(Y.y1)) +
                s2 * (X1 * std::conj(Y.y1) + X.y1 * std::conj(Y1)));
}

cplx split_trace_shift(const SplitEnd& X, const SplitEnd& Y, double r, double w) {
    const cplx X0 = X.x0 + X.dx0, X1 = X.x1 + X.dx1, Y0 = Y.x0 + Y.dx0, Y1 = Y.x1 + Y.dx1;
    const double sh = std::sinh(w);
    const double c2m1 = 2 * sh * sh, s2 = std::sinh(2 * w);
    const cplx block0 = X.dx0 * std::conj(Y0) + X.x0 * std::conj(Y.dx0) + X.y0 * std::conj(Y.y0);
    const cplx block1 = c2m1 * (X1 * std::conj(Y1) + X.y1 * std::conj(Y.y1)) + X.dx1 * std::conj(Y1) +
                        X.x1 * std::conj(Y.dx1) + X.y1 * std::conj(Y.y1) +
                        s2 * (X1 * std::conj(Y.y1) + X.y1 * std::conj(Y1));
    return 2.0 * block0 + 2 * kC * kC * r * block1;
}

Mat2 model_frame(cplx dz_dzeta) {
    const cplx d = std::sqrt(3.0 / (2.0 * dz_dzeta));
    Mat2 D = Mat2::Zero();
    D(0, 0) = d;
    D(1, 1) = 1.0 / d;
    return D;
}

FormValue to_global(const FormValue& local, cplx dz_dzeta) {
    const Mat2 D = model_frame(dz_dzeta);
    const Mat2 Di = D.inverse();
    return {D * local.dz * Di / dz_dzeta, D * local.dzbar * Di / std::conj(dz_dzeta)};
}

Mat2 metric_to_global(const Mat2& H_local, cplx dz_dzeta) {
    const Mat2 D = model_frame(dz_dzeta);
    const Mat2 Dti = D.transpose().inverse();
    return Dti * H_local * D.conjugate().inverse();
}

}  // namespace sfl
