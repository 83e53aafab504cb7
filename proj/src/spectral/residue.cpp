#include <cmath>

#include "sfl/spectral.hpp"

namespace sfl {

namespace {

constexpr int kWide = 1 << 12;

void check_upsilon(const PowerSeries& u) {
    if (u.valuation() < -1) throw InputError("aux input: upsilon has a pole of order above 1");
}

}  // namespace

cplx res2_at_branch(const PowerSeries& g) {
    if (g.valuation() < -2) throw InputError("res2: pole of order above 2");
    return g.coeff(-2);
}

AuxInput AuxInput::zero() { return {}; }

AuxInput AuxInput::from_local(const std::vector<PowerSeries>& e) {
    // e d xi = upsilon dzP with dzP = (8/9) xi d xi
    AuxInput a;
    for (const auto& s : e) a.upsilon.push_back(s * PowerSeries::monomial(9.0 / 8.0, -1, kWide));
    return a;
}

AuxInput AuxInput::from_form(const SpectralCurve& curve, const HolDifferential& r, int order) {
    std::vector<PowerSeries> e;
    for (std::size_t i = 0; i < curve.branch_points().size(); ++i) e.push_back(local_expansion(curve, r, i, order));
    return from_local(e);
}

AuxInput AuxInput::scaled(cplx c) const {
    AuxInput a = *this;
    for (auto& u : a.upsilon) u = u * c;
    return a;
}

PowerSeries aux_integrand(const LocalAuxTerm& term) {
    check_upsilon(term.upsilon);
    // nu1 nu2 upsilon (8/9) xi d xi / ((8/9) xi^2 d xi) = n1 n2 upsilon xi^{-1} d xi^2
    return term.n1 * term.n2 * term.upsilon * PowerSeries::monomial(1.0, -1, kWide);
}

cplx aux_pairing_local(const LocalAuxTerm& term) { return -4 * M_PI * res2_at_branch(aux_integrand(term)); }

cplx aux_boundary_closed_form(const LocalAuxTerm& term) {
    check_upsilon(term.upsilon);
    return cplx(0, 2 * M_PI) * term.n1.coeff(0) * term.upsilon.coeff(-1) * term.n2.coeff(0);
}

cplx aux_pairing(const SpectralCurve& curve, const HolDifferential& nu, const HolDifferential& mu,
                 const AuxInput& eta) {
    if (eta.upsilon.empty()) return 0.0;
    if (eta.upsilon.size() != curve.branch_points().size())
        throw InputError("aux pairing: eta must give one series per branch point");
    cplx sum = 0.0;
    for (std::size_t i = 0; i < eta.upsilon.size(); ++i) {
        const LocalAuxTerm term{local_expansion(curve, nu, i), local_expansion(curve, mu, i), eta.upsilon[i]};
        sum += aux_pairing_local(term);
    }
    return sum;
}

}  // namespace sfl
