#include <cmath>

#include "sfl/localmodel.hpp"

namespace sfl {

Mat2 adjoint(const Mat2& A, const Mat2& H) {
    const Mat2 K = H.conjugate();
    return K.inverse() * A.adjoint() * K;
}

Mat2 ModelHiggs::F(cplx z) {
    Mat2 f;
    f << 0.0, 1.5 * z, 1.5, 0.0;
    return f;
}

Mat2 ModelHiggs::C0() {
    Mat2 c;
    c << 0.0, 1.0, 1.0, 0.0;
    return c;
}

double commutator_norm_sq(const Mat2& H) {
    const double det = (H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0)).real();
    if (std::abs(det - 1.0) > 1e-10 * std::max(1.0, std::abs(H(0, 0) * H(1, 1))))
        throw InputError("commutator_norm_sq: det H != 1");
    const double b2 = std::norm(H(0, 1));
    return 8.0 * (1.0 + b2) * b2;
}

double dpi_norm_sq(double a, cplx b, double c, cplx da, cplx db, cplx dbbar, cplx dc) {
    const cplx dba = std::conj(da), dbc = std::conj(dc), dbb = std::conj(dbbar), dbbbar = std::conj(db);
    const double b2 = std::norm(b);
    const double s = 1.0 + b2;
    const cplx cross = b * a * a * c * dbbar * dbc + std::conj(b) * a * c * c * db * dba +
                       b * b * (-c * dbbar + std::conj(b) * dc) * (-std::conj(b) * dba + a * dbbbar);
    return s * s * (std::norm(dbb) + std::norm(db)) + b2 * (a * a * std::norm(dc) + c * c * std::norm(da)) -
           2.0 * cross.real();
}

}  // namespace sfl
