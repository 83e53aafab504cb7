#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sfl/numerics.hpp"

namespace sfl {

using Mat2 = Eigen::Matrix2cd;

/// Conjugate-transpose adjoint with respect to the metric K = conj(H): K^{-1} A^* K.
Mat2 adjoint(const Mat2& A, const Mat2& H);

// ---------------------------------------------------------------------------
// Model Higgs bundle at a simple zero

struct ModelHiggs {
    double t = 1.0;

    /// Higgs matrix in the frame (u1, u2): theta(u1) = 3/2 u2 dz, theta(u2) = 3/2 z u1 dz.
    static Mat2 F(cplx z);
    /// Symmetric pairing with C(u_i, u_i) = 0, C(u1, u2) = 1.
    static Mat2 C0();
};

struct ProfileOptions {
    std::size_t cells = 20000;
    double tol = 1e-9;
    int max_iter = 60;
};

/// Radial harmonic metric diag(e^psi, e^-psi) of the model; v = psi + log(r)/2.
struct ModelMetricProfile {
    double t = 1.0;
    double r_max = 0.0;
    RadialProfile psi;         ///< psi and psi' on the mesh, psi(0) finite
    std::vector<double> v;     ///< v on the mesh; v[0] = -inf
    std::vector<double> dv;
    double residual = 0.0;     ///< control-volume residual over the flux scale
    double pointwise = 0.0;    ///< max pointwise residual of the discrete equation
    int iterations = 0;

    double psi_at(double r) const;
    double dpsi_at(double r) const;
    double v_at(double r) const;
    double dv_at(double r) const;
};

/// Solves psi'' + psi'/r = 9 t^2 (r^2 e^{2 psi} - e^{-2 psi}), psi'(0) = 0, v(r_max) = 0.
ModelMetricProfile painleve_profile(double t, double r_max, const ProfileOptions& opt = {});

/// psi(0) by shooting from the regular series at the origin and bisecting on the far-field branch.
double shooting_psi0(double t, double r_out);

/// diag(e^{psi(|z|)}, e^{-psi(|z|)}) in the frame (u1, u2).
Mat2 model_metric_at(const ModelMetricProfile& profile, cplx z);

// ---------------------------------------------------------------------------
// Disc solutions of the Hitchin equation with f = diag(1, -1)

/// |[f^dagger_h, pi_1]|_h^2 for H = [[a, b], [conj b, c]] with det H = 1.
double commutator_norm_sq(const Mat2& H);

/// Closed form of |d_{E,h} pi_1|^2 from a, b, c and their z-derivatives.
double dpi_norm_sq(double a, cplx b, double c, cplx da, cplx db, cplx dbbar, cplx dc);

struct DiscOptions {
    std::size_t divisions = 128;  ///< h = R / divisions
    NewtonOptions newton;
};

/// Metric H = [[a, b], [conj b, c]] on a disc grid, c = (1 + |b|^2) / a.
struct HermitianField {
    std::shared_ptr<const Grid2D> grid;
    double R = 0.0;
    std::vector<double> u;  ///< node-major (log a, Re b, Im b)
    NewtonReport report;

    double a(std::size_t i) const;
    cplx b(std::size_t i) const;
    double c(std::size_t i) const;
    Mat2 H(std::size_t i) const;
};

/// Metric H = [[a, i bt], [-i bt, a]] with a = sqrt(1 + bt^2).
struct SymmetricField {
    std::shared_ptr<const Grid2D> grid;
    double R = 0.0;
    std::vector<double> bt;
    NewtonReport report;

    double a(std::size_t i) const;
};

/// Nodal residual of the symmetric-case equation for bt (one component).
void symmetric_residual(const StencilView& s, double* out);
/// Nodal residual of the full equation in the unknowns (log a, Re b, Im b).
void general_residual(const StencilView& s, double* out);

SymmetricField solve_disc_symmetric(double R, const std::function<double(cplx)>& boundary_b,
                                    const DiscOptions& opt = {});
HermitianField solve_disc_general(double R, const std::function<Mat2(cplx)>& boundary_H,
                                  const DiscOptions& opt = {});

struct SubsolutionReport {
    double max_violation = 0.0;   ///< max of (lhs - rhs) over checked nodes, clipped at 0
    std::size_t checked = 0;
    double slack = 0.0;           ///< 10 h^2 (scaled by max|b| for the symmetric case)
};

/// -dd|b|^2 <= -8|b|^2 at interior nodes with b != 0.
SubsolutionReport subsolution_check(const HermitianField& f);
/// -dd|bt| <= -4|bt| at interior nodes with bt != 0.
SubsolutionReport subsolution_check(const SymmetricField& f);

struct EnergyReport {
    double max_residual = 0.0;  ///< max |-dd(ac) + |d pi|^2 + |[f^dagger, pi]|^2|
    std::size_t checked = 0;
};

/// Discrete energy identity at interior nodes at least `margin` from the boundary.
EnergyReport energy_identity(const HermitianField& f, double margin);

/// Fit of |b| against R - |z| over r_lo < |z| < r_hi.
DecayFit offdiag_decay(const HermitianField& f, double r_lo, double r_hi);
DecayFit offdiag_decay(const SymmetricField& f, double r_lo, double r_hi);

/// max over interior nodes of |bt| - 2 max_boundary|bt| I0(4|z|)/I0(4R).
double barrier_excess(const SymmetricField& f);

}  // namespace sfl
