#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sfl/quadiff.hpp"

namespace sfl {

/// xi^2 = p(z) over the plane. Cuts join consecutive branch points (sorted order); for odd
/// degree the last one runs to infinity. The labelled sheet is xi = sheet_value(z).
class SpectralCurve {
public:
    explicit SpectralCurve(QuadraticDifferential p);

    const QuadraticDifferential& phi() const { return phi_; }
    int genus() const { return genus_; }
    const std::vector<Zero>& branch_points() const { return zeros_; }

    struct Cut {
        cplx a;
        cplx b;          ///< endpoint; for the ray to infinity, a point on the ray
        bool infinite = false;
    };
    const std::vector<Cut>& cuts() const { return cuts_; }

    /// p^{1/2} on the labelled sheet, continuous off the cuts.
    cplx sheet_value(cplx z) const;
    /// Number of cuts crossed by the segment [a, b].
    int cut_crossings(cplx a, cplx b) const;

    /// Replace the cube-root coordinate at branch point i by omega^k zP, omega = e^{2 pi i / 3}.
    void rotate_coordinate(std::size_t i, int k);
    int rotation(std::size_t i) const { return rotation_[i]; }
    /// zP at branch point i in the current coordinate.
    cplx zP(std::size_t i, cplx z) const;
    /// z - P as a series in the fibre coordinate xi_P (xi_P^2 = (9/4) zP).
    PowerSeries z_of_xi(std::size_t i, int order = 24) const;

private:
    QuadraticDifferential phi_;
    int genus_ = 0;
    std::vector<Zero> zeros_;
    std::vector<Cut> cuts_;
    std::vector<int> rotation_;
};

/// nu = q(z) dz / xi.
struct HolDifferential {
    std::vector<cplx> q;  ///< lowest degree first

    cplx numerator(cplx z) const;
    static HolDifferential monomial(int k);
};

/// Monomial basis z^{k} dz / xi, k < genus.
std::vector<HolDifferential> canonical_basis(const SpectralCurve& curve);

/// nu = n(xi_P) d xi_P near branch point i.
PowerSeries local_expansion(const SpectralCurve& curve, const HolDifferential& nu, std::size_t i,
                            int order = 16);

enum class QuadratureScheme { Polar, Cartesian };

struct L2Options {
    QuadratureScheme scheme = QuadratureScheme::Polar;
    double radius = 0.0;   ///< inner disc radius; 0 picks 2 max|branch| + 1
    double tol = 1e-9;     ///< relative tolerance of each 1D quadrature
    bool interior_only = false;  ///< restrict to |z| < radius; no integrability requirement
};

struct L2Report {
    cplx value;        ///< interior + exterior
    cplx interior;     ///< both sheets over |z| < radius
    cplx exterior;     ///< both sheets over |z| > radius
    double tail_bound = 0.0;  ///< leading-order bound of the exterior part from the degrees
    double radius = 0.0;
};

/// 2i int_Sigma nu1 ^ conj(nu2) over both sheets (dx ^ dy > 0).
L2Report l2_pairing_hol(const SpectralCurve& curve, const HolDifferential& nu1,
                        const HolDifferential& nu2, const L2Options& opt = {});

/// -2i int_Sigma tau1 ^ conj(tau2) for antiholomorphic tau_j = conj(mu_j); equals conj of the
/// holomorphic pairing of (mu1, mu2).
L2Report l2_pairing_antihol(const SpectralCurve& curve, const HolDifferential& mu1,
                            const HolDifferential& mu2, const L2Options& opt = {});

struct GramBlocks {
    Eigen::MatrixXcd hor;     ///< hor-hor
    Eigen::MatrixXcd ver;     ///< ver-ver
    Eigen::MatrixXcd hor_ver; ///< hor-ver (rows hor, columns ver)

    /// Hermitian matrix on hor + ver.
    Eigen::MatrixXcd full() const;
};

/// Semi-flat blocks; the vertical basis is tau_j = conj(ver[j]). hor_ver is zero.
GramBlocks semiflat_gram(const SpectralCurve& curve, const std::vector<HolDifferential>& hor,
                         const std::vector<HolDifferential>& ver, const L2Options& opt = {});

/// Coefficient of xi^{-2} of g(xi) d xi^2; throws InputError for a pole of order > 2.
cplx res2_at_branch(const PowerSeries& g);

/// eta = upsilon_P(xi_P) dzP near each branch point, upsilon_P with at most a simple pole.
struct AuxInput {
    std::vector<PowerSeries> upsilon;  ///< one per branch point; empty vector means eta = 0

    static AuxInput zero();
    /// eta = e_i(xi_P) d xi_P at branch point i.
    static AuxInput from_local(const std::vector<PowerSeries>& e);
    /// eta = r(z) dz / xi.
    static AuxInput from_form(const SpectralCurve& curve, const HolDifferential& r, int order = 16);
    AuxInput scaled(cplx c) const;
};

/// Local data at one branch point: nu_j = n_j(xi) d xi, eta = upsilon dzP.
struct LocalAuxTerm {
    PowerSeries n1;
    PowerSeries n2;
    PowerSeries upsilon;
};

/// -4 pi Res2(nu1 nu2 eta / phi^{1/2}) with phi^{1/2} = (8/9) xi^2 d xi.
cplx aux_pairing_local(const LocalAuxTerm& term);
/// The quadratic differential nu1 nu2 eta / phi^{1/2} as a series in xi.
PowerSeries aux_integrand(const LocalAuxTerm& term);
/// 2 pi i (d alpha)(xi upsilon)(d beta)|_{xi=0} with n1 = d alpha, n2 = d beta.
cplx aux_boundary_closed_form(const LocalAuxTerm& term);

/// Sum over branch points (in sorted order) of the local pairing of nu and mu = conj(tau).
cplx aux_pairing(const SpectralCurve& curve, const HolDifferential& nu, const HolDifferential& mu,
                 const AuxInput& eta);

/// Auxiliary blocks: hor and ver zero, hor_ver(i, j) = aux_pairing(hor[i], ver[j]).
GramBlocks aux_gram(const SpectralCurve& curve, const std::vector<HolDifferential>& hor,
                    const std::vector<HolDifferential>& ver, const AuxInput& eta);

struct AuxSmallnessRow {
    double t = 0.0;
    double relative = 0.0;    ///< |G_hor^{-1/2} A G_ver^{-1/2}|_2
    bool positive = false;    ///< g_sf + g_aux positive definite
};

struct AuxSmallnessReport {
    std::vector<AuxSmallnessRow> rows;
    DecayFit fit;                      ///< of `relative` against t
    std::optional<double> threshold;   ///< first t after which every row is positive definite
};

AuxSmallnessReport aux_smallness_report(const SpectralCurve& curve,
                                        const std::vector<HolDifferential>& hor,
                                        const std::vector<HolDifferential>& ver,
                                        const std::function<AuxInput(double)>& eta_t,
                                        const std::vector<double>& ts, const L2Options& opt = {});

}  // namespace sfl
