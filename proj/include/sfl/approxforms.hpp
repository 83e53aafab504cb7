#pragma once

#include <functional>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "sfl/localmodel.hpp"
#include "sfl/quadiff.hpp"
#include "sfl/spectral.hpp"

namespace sfl {

// ---------------------------------------------------------------------------
// Limiting configuration in the global frame e = (e1, e2)

/// theta = Theta dz with Theta = [[0, p], [1, 0]]; C(e1, e2) = 1, C(e_i, e_i) = 0.
Mat2 global_higgs(const QuadraticDifferential& phi, cplx z);

/// diag(|p|^{-1/2}, |p|^{1/2}); throws DomainError at a zero.
Mat2 limiting_metric(const QuadraticDifferential& phi, cplx z);

/// Columns are the eigenvectors (xi, 1) and (-xi, 1) of Theta, xi^2 = p.
Mat2 sheet_frame(cplx xi);

/// Gram matrix h(s_i, s_j) = (S^T H conj(S))_{ij} of the columns of S.
Mat2 gram_in_frame(const Mat2& H, const Mat2& S);

/// Multiplication by alpha on the spectral cover: a0 + a1 Theta with a0, a1 the even and
/// odd parts of alpha(xi) in xi. Throws FrameError at a zero.
Mat2 F_alpha(const QuadraticDifferential& phi, const std::function<cplx(cplx z, cplx xi)>& alpha,
             cplx z);

// ---------------------------------------------------------------------------
// Cutoffs

struct CutoffSchedule {
    double kappa0 = 0.0;
    double kappa = 0.0;
    double delta = 0.0;

    /// kappa0 = M / 2, delta = min{(kappa0 - kappa) / 10, kappa / 20}; throws ScheduleError
    /// unless 0 < kappa < kappa0.
    static CutoffSchedule from_threshold(double M, double kappa);

    double outer() const { return kappa0 - delta; }        ///< flat radius of X1
    double inner() const { return kappa0 - 2.0 * delta; }  ///< flat radius of X2
    /// Smooth step in the flat distance d: 1 for d <= inner(), 0 for d >= outer().
    double chi(double d) const;
    double dchi(double d) const;
};

// ---------------------------------------------------------------------------
// Model frame near a zero: zeta = zP, u = D e, Theta dz = f dzeta with f = ModelHiggs::F(zeta).

/// X = (x0 + dx0) id + (x1 + dx1) f + y0 s3 + y1 s3 f with s3 = diag(1, -1).
/// (x0, x1) is a reference commuting part; pairings are reported relative to it.
struct SplitEnd {
    cplx x0 = 0.0, x1 = 0.0;
    cplx dx0 = 0.0, dx1 = 0.0;
    cplx y0 = 0.0, y1 = 0.0;

    Mat2 matrix(cplx zeta) const;
    /// Decomposition of X at zeta != 0 with zero reference part.
    static SplitEnd of(const Mat2& X, cplx zeta);
    /// The part commuting with f.
    Mat2 commuting(cplx zeta) const;
};

/// Coefficients of dzeta and dzetabar.
struct SplitForm {
    SplitEnd dz;
    SplitEnd dzbar;
};

struct FormValue {
    Mat2 dz = Mat2::Zero();
    Mat2 dzbar = Mat2::Zero();
};

FormValue to_matrices(const SplitForm& f, cplx zeta);

/// Tr(X Y^dagger) for the metric diag(e^psi, e^-psi), psi = -log(r) / 2 + w, r = |zeta|.
cplx split_trace(const SplitEnd& X, const SplitEnd& Y, double r, double w);
/// split_trace(X, Y, r, w) minus the same for the reference parts at w = 0, without cancellation.
cplx split_trace_shift(const SplitEnd& X, const SplitEnd& Y, double r, double w);

/// Matrix of the model frame in the global frame: D = diag(d, 1/d), d^2 = 3 / (2 dz/dzeta).
Mat2 model_frame(cplx dz_dzeta);
/// Model-frame coefficients of dzeta, dzetabar to global-frame coefficients of dz, dzbar.
FormValue to_global(const FormValue& local, cplx dz_dzeta);
/// Model-frame Hermitian matrix to the global frame.
Mat2 metric_to_global(const Mat2& H_local, cplx dz_dzeta);

struct ChartPoint {
    cplx zeta;
    cplx z;
    cplx dz;                    ///< dz/dzeta
    std::vector<cplx> alpha1;   ///< alpha / xi_P per form, alpha the primitive vanishing at P
    std::vector<cplx> g1;       ///< q / p per form: F_nu = g1 f dzeta
};

/// The flat disc |zeta| < R^{2/3} about a simple zero, with primitives of the given forms.
class ZeroChart {
public:
    ZeroChart(const QuadraticDifferential& phi, const Zero& P, double flat_radius,
              std::vector<HolDifferential> forms = {});

    const Zero& zero() const { return P_; }
    double flat_radius() const { return R_; }
    double rho_max() const { return rho_max_; }

    /// Points zeta = rho e^{i arg} for increasing rho in [0, rho_max].
    std::vector<ChartPoint> ray(double arg, std::span<const double> rho) const;
    /// zeta(z) and dzeta/dz from the segment [P, z]; the caller guarantees z lies in the chart.
    std::pair<cplx, cplx> zeta_of(cplx z) const;

private:
    ChartPoint series_point(cplx zeta) const;

    QuadraticDifferential phi_;
    Zero P_;
    double R_;
    double rho_max_;
    double rho_series_;
    std::vector<HolDifferential> forms_;
    PowerSeries dz_;                     ///< dz/dzeta
    std::vector<PowerSeries> alpha1_;    ///< alpha / xi_P as series in zeta
};

// ---------------------------------------------------------------------------
// Glued metric

/// Model-frame metric diag(e^psi, e^-psi) with psi = -log(rho)/2 + chi v on the charts and
/// h_inf elsewhere. Every zero uses the same radial profile.
class GluedMetric {
public:
    GluedMetric(const QuadraticDifferential& phi, double t, const CutoffSchedule& schedule,
                const ProfileOptions& opt = {});

    const QuadraticDifferential& phi() const { return phi_; }
    double t() const { return t_; }
    const CutoffSchedule& schedule() const { return s_; }
    const ModelMetricProfile& profile() const { return profile_; }
    const std::vector<ZeroChart>& charts() const { return charts_; }

    /// Gauge exponent w = chi v at |zeta| = rho (0 beyond X1).
    double gauge(double rho) const;
    /// d w / d zetabar.
    cplx dgauge_bar(cplx zeta) const;
    Mat2 local(cplx zeta) const;
    /// Chart index, zeta and dzeta/dz for z inside X1; empty elsewhere.
    std::optional<std::tuple<std::size_t, cplx, cplx>> locate(cplx z) const;
    /// Global-frame matrix at z.
    Mat2 at(cplx z) const;

private:
    QuadraticDifferential phi_;
    double t_;
    CutoffSchedule s_;
    ModelMetricProfile profile_;
    std::vector<ZeroChart> charts_;
    std::vector<double> reach_;   ///< Euclidean radius about each zero containing its chart
};

/// Profile radius with a decoupled far field and room for X1.
double profile_radius(double t, double kappa0);

struct GlueDeviation {
    double diag = 0.0;   ///< max |s° - id| over X1 minus X2
    double off = 0.0;    ///< max |s_perp|
};

/// s = h_inf^{-1} h~ on the glue annulus, measured with h_inf.
GlueDeviation glue_deviation(const GluedMetric& g, std::size_t samples = 200);

// ---------------------------------------------------------------------------
// Approximate harmonic forms in the model frame. `a1` and `g1` are the chart values of
// alpha / xi_P and q / p for nu; `b1`, `m1` the same for mu with tau = conj(mu).

/// H_{P,t}(nu) = (d_h + t ad theta^dagger) F_alpha for the model metric.
SplitForm H_model(const ModelMetricProfile& profile, cplx zeta, cplx a1, cplx g1);
/// rho_{P,t}(nu), solving (dbar + t ad theta) rho = H_{P,t} - F_nu; a multiple of s3.
cplx rho_model(const ModelMetricProfile& profile, cplx zeta, cplx a1);
/// H' on a chart: F_nu + (dbar + t ad theta)(chi rho).
SplitForm H_prime_local(const GluedMetric& g, cplx zeta, cplx a1, cplx g1);
/// F_b^dagger for the glued metric, b = alpha-type primitive of mu.
SplitEnd F_dagger_local(const GluedMetric& g, cplx zeta, cplx b1);
/// V' on a chart: F_{tau°} + (dbar + t ad theta)(chi F_b^dagger).
SplitForm V_prime_local(const GluedMetric& g, cplx zeta, cplx b1, cplx m1);

/// H' and V' at a global point z in the global frame (dz, dzbar coefficients).
FormValue H_prime(const GluedMetric& g, const HolDifferential& nu, cplx z);
FormValue V_prime(const GluedMetric& g, const HolDifferential& mu, cplx z);

// ---------------------------------------------------------------------------
// L2 pairings and Stokes identities in a planar coordinate

/// Metric in a coordinate: H and the (1,0) Chern connection A = conj(H)^{-1} d conj(H).
struct MetricField {
    std::function<Mat2(cplx)> H;
    std::function<Mat2(cplx)> A;
};

/// Model metric of the profile (w = v) or of the glued metric.
MetricField model_metric_field(const ModelMetricProfile& profile);
MetricField glued_metric_field(const GluedMetric& g);

/// Disc or annulus r_in < |z - center| < r_out.
struct PolarRegion {
    cplx center = 0.0;
    double r_in = 0.0;
    double r_out = 1.0;
};

struct QuadratureOptions {
    std::size_t angles = 96;
    std::size_t panels = 8;      ///< radial Gauss panels, uniform in sqrt(r - r_in)
};

using FormField = std::function<FormValue(cplx)>;

/// 4 int_W Tr(X1 X2^dagger) + Tr(Y1 Y2^dagger) dA for rho_j = X_j dz + Y_j dzbar.
cplx l2_pairing_forms(const FormField& r1, const FormField& r2, const MetricField& m,
                      const PolarRegion& W, const QuadratureOptions& q = {});

struct StokesReport {
    cplx lhs;        ///< ((d_h + ad theta^dagger) a, b) over W
    cplx boundary;   ///< 2i contour of Tr(a (b^{1,0})^dagger) dzbar
    cplx adjoint;    ///< 4 int_W Tr(a Omega^dagger) dA, (dbar + ad theta) b = Omega dz ^ dzbar
    double defect = 0.0;
    double norms = 0.0;  ///< sup|a|_{C1} sup|b|_{C1} area(W) over the nodes
    double h = 0.0;      ///< finite-difference step
};

/// Both sides of the Stokes corollary for a section a and a form b with Higgs coefficient
/// Theta; derivatives by central differences of step h.
StokesReport stokes_check(const std::function<Mat2(cplx)>& a, const FormField& b,
                          const MetricField& m, const std::function<Mat2(cplx)>& Theta,
                          const PolarRegion& W, double h, const QuadratureOptions& q = {});

/// 2i contour over |zeta| = radius of Tr(alpha1 F_upsilon F_{d beta/d zeta}) summed over the
/// sheets, assembled from 2x2 matrices.
cplx aux_boundary_pairing(const LocalAuxTerm& term, double radius, std::size_t n = 256);

// ---------------------------------------------------------------------------
// Error-term lemmas

struct LemmaFit {
    double gamma = 0.0;
    double envelope_rate = 0.0;   ///< fit of the max remainder over trials
    double min_rate = 0.0;        ///< smallest per-trial fit
    double median_rate = 0.0;
    double max_remainder = 0.0;   ///< over all trials and t
};

struct ErrorLemmaReport {
    std::vector<LemmaFit> trace_lemma;   ///< Tr(A1 A2^dagger) against the diagonal products
    std::vector<LemmaFit> norm_lemma;    ///< |G|^2 against |alpha_i + beta_i|^2
};

struct ErrorLemmaOptions {
    std::size_t trials = 100;
    std::vector<double> gammas{0.5, 1.0, 2.0};
    std::vector<double> ts;       ///< empty picks 1, 1.5, ..., 10
    unsigned seed = 7;
    double offdiag = 1.0;         ///< scale of the e^{-gamma t} perturbations
    double drift = 1.0;           ///< scale of the e^{-2 gamma t} diagonal drift
};

/// Remainders evaluated in 50-digit arithmetic.
ErrorLemmaReport error_lemma_checks(const ErrorLemmaOptions& opt = {});

// ---------------------------------------------------------------------------
// Pairing report

struct PairingRow {
    double t = 0.0;
    cplx pair_HH, target_HH;
    cplx pair_VV, target_VV;
    cplx pair_HV, target_HV;
    double diff_HH = 0.0;   ///< |pair - target|
    double diff_VV = 0.0;
    double diff_HV = 0.0;
};

struct PairingFits {
    std::optional<DecayFit> HH, VV, HV;   ///< empty when every difference is exactly zero
};

struct PairingReport {
    CutoffSchedule schedule;
    double region_radius = 0.0;   ///< pairings over |z| < region_radius
    std::vector<PairingRow> rows;
    PairingFits fits;
};

struct PairingOptions {
    L2Options spectral;
    std::size_t angles = 64;
    std::size_t panels = 6;       ///< Gauss panels across the glue annulus
    ProfileOptions profile;
    unsigned jobs = 1;
};

/// (H', H'), (V', V'), (H', V') with the glued metric against the spectral targets
/// ||nu||^2, ||tau||^2 and the auxiliary pairing. On X2 the harmonic pieces are reduced to
/// contour integrals on its boundary; the glue annulus is integrated directly.
PairingReport pairing_report(const SpectralCurve& curve, const HolDifferential& nu,
                             const HolDifferential& mu, const AuxInput& eta,
                             const CutoffSchedule& schedule, std::span<const double> ts,
                             const PairingOptions& opt = {});

}  // namespace sfl
