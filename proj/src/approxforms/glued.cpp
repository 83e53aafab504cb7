#include <algorithm>
#include <cmath>

#include "sfl/approxforms.hpp"

namespace sfl {

namespace {

constexpr double kC = 1.5;

double flat_d(double rho) { return std::pow(rho, 1.5); }

/// d chi / d zetabar at zeta with chi a function of d = |zeta|^{3/2}.
cplx dchi_bar(const CutoffSchedule& s, cplx zeta) {
    const double rho = std::abs(zeta);
    if (rho == 0.0) return 0.0;
    const double dc = s.dchi(flat_d(rho));
    if (dc == 0.0) return 0.0;
    return dc * 0.75 * zeta / std::sqrt(rho);
}

/// r sinh(2v) = (r^2 e^{2 psi} - e^{-2 psi}) / 2, finite at r = 0.
double r_sinh2v(const ModelMetricProfile& prof, double r) {
    const double psi = prof.psi_at(r);
    return 0.5 * (r * r * std::exp(2 * psi) - std::exp(-2 * psi));
}

/// d v / d zeta = v'(r) conj(zeta) / (2 r).
cplx dv_dzeta(const ModelMetricProfile& prof, cplx zeta) {
    const double r = std::abs(zeta);
    if (r == 0.0) throw DomainError("model form: singular frame at zeta = 0");
    return prof.dv_at(r) * std::conj(zeta) / (2 * r);
}

}  // namespace

double profile_radius(double t, double kappa0) {
    return std::pow(std::max(kappa0 + 1.5, 8.0 / t), 2.0 / 3.0);
}

GluedMetric::GluedMetric(const QuadraticDifferential& phi, double t, const CutoffSchedule& schedule,
                         const ProfileOptions& opt)
    : phi_(phi), t_(t), s_(schedule) {
    if (!(t >= 1.0)) throw PreconditionError("GluedMetric: need t >= 1");
    const auto& s = s_;
    if (!(s.kappa > 0.0 && s.kappa < s.kappa0 && s.delta > 0.0 && s.inner() > s.kappa))
        throw ScheduleError("GluedMetric: need 0 < kappa < kappa0 - 2 delta");
    if (phi.degree() < 1) throw ScheduleError("GluedMetric: no zeros to glue at");
    const auto zs = zeros(phi);
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (std::size_t j = i + 1; j < zs.size(); ++j) {
            const cplx seg[] = {zs[i].location, zs[j].location};
            if (flat_length(phi, seg) < 2 * s.kappa0 * (1 - 1e-9))
                throw ScheduleError("GluedMetric: zeros closer than 2 kappa0 in flat distance");
        }
    profile_ = painleve_profile(t, profile_radius(t, s.kappa0), opt);
    for (const auto& P : zs) {
        charts_.emplace_back(phi, P, s.kappa0);
        const ZeroChart& c = charts_.back();
        double reach = 0.0;
        const double rho[] = {c.rho_max()};
        for (int k = 0; k < 48; ++k) {
            const auto p = c.ray(2 * M_PI * k / 48.0, rho).front();
            reach = std::max(reach, std::abs(p.z - P.location));
        }
        reach_.push_back(1.1 * reach);
    }
}

double GluedMetric::gauge(double rho) const {
    const double c = s_.chi(flat_d(rho));
    if (c == 0.0) return 0.0;
    return c * profile_.v_at(rho);
}

cplx GluedMetric::dgauge_bar(cplx zeta) const {
    const double rho = std::abs(zeta);
    const double c = s_.chi(flat_d(rho));
    if (c == 0.0) return 0.0;
    // d/dzetabar of chi v: (d chi) v + chi v' zeta / (2 rho)
    return dchi_bar(s_, zeta) * profile_.v_at(rho) + c * profile_.dv_at(rho) * zeta / (2 * rho);
}

Mat2 GluedMetric::local(cplx zeta) const {
    const double rho = std::abs(zeta);
    const double c = s_.chi(flat_d(rho));
    Mat2 H = Mat2::Zero();
    if (c == 1.0) return model_metric_at(profile_, zeta);
    if (c == 0.0) {
        H(0, 0) = std::pow(rho, -0.5);
        H(1, 1) = std::pow(rho, 0.5);
        return H;
    }
    const double psi = -0.5 * std::log(rho) + c * profile_.v_at(rho);
    H(0, 0) = std::exp(psi);
    H(1, 1) = std::exp(-psi);
    return H;
}

std::optional<std::tuple<std::size_t, cplx, cplx>> GluedMetric::locate(cplx z) const {
    for (std::size_t i = 0; i < charts_.size(); ++i) {
        const auto& c = charts_[i];
        if (std::abs(z - c.zero().location) > reach_[i]) continue;
        const auto [zeta, dzeta] = c.zeta_of(z);
        if (flat_d(std::abs(zeta)) < s_.outer()) return std::make_tuple(i, zeta, dzeta);
    }
    return std::nullopt;
}

Mat2 GluedMetric::at(cplx z) const {
    if (const auto hit = locate(z)) return metric_to_global(local(std::get<1>(*hit)), 1.0 / std::get<2>(*hit));
    return limiting_metric(phi_, z);
}

GlueDeviation glue_deviation(const GluedMetric& g, std::size_t samples) {
    // s = diag(e^w, e^-w) in the model frame: s° = cosh(w) id, s_perp = sinh(w) s3, |id|_h = |s3|_h = sqrt 2
    const auto& s = g.schedule();
    GlueDeviation out;
    for (std::size_t k = 0; k <= samples; ++k) {
        const double d = s.inner() + (s.outer() - s.inner()) * static_cast<double>(k) / samples;
        const double w = g.gauge(std::pow(d, 2.0 / 3.0));
        const double sh = std::sinh(0.5 * w);
        out.diag = std::max(out.diag, std::sqrt(2.0) * 2 * sh * sh);
        out.off = std::max(out.off, std::sqrt(2.0) * std::abs(std::sinh(w)));
    }
    return out;
}

// ---------------------------------------------------------------------------

SplitForm H_model(const ModelMetricProfile& profile, cplx zeta, cplx a1, cplx g1) {
    SplitForm f;
    if (a1 == cplx(0.0) && g1 == cplx(0.0)) return f;
    const double r = std::abs(zeta);
    f.dz.x1 = g1;
    f.dz.y1 = 2.0 * a1 * dv_dzeta(profile, zeta);
    f.dzbar.y0 = profile.t * a1 * (-2 * kC * kC * r_sinh2v(profile, r));
    return f;
}

cplx rho_model(const ModelMetricProfile& profile, cplx zeta, cplx a1) {
    if (a1 == cplx(0.0)) return 0.0;
    return -a1 * dv_dzeta(profile, zeta) / profile.t;
}

SplitForm H_prime_local(const GluedMetric& g, cplx zeta, cplx a1, cplx g1) {
    SplitForm f;
    f.dz.x1 = g1;
    const double r = std::abs(zeta);
    const double c = g.schedule().chi(flat_d(r));
    if (c == 0.0 || (a1 == cplx(0.0) && g1 == cplx(0.0))) return f;
    const auto& prof = g.profile();
    const cplx dv = dv_dzeta(prof, zeta);
    f.dz.y1 = c * 2.0 * a1 * dv;
    f.dzbar.y0 = c * g.t() * a1 * (-2 * kC * kC * r_sinh2v(prof, r)) + dchi_bar(g.schedule(), zeta) * (-a1 * dv / g.t());
    return f;
}

SplitEnd F_dagger_local(const GluedMetric& g, cplx zeta, cplx b1) {
    const double rho = std::abs(zeta);
    const cplx B = std::conj(b1) * std::conj(zeta) / rho;
    const double w = g.gauge(rho);
    const double sh = std::sinh(w);
    SplitEnd e;
    e.x1 = B;
    e.dx1 = B * (2 * sh * sh);
    e.y1 = -B * std::sinh(2 * w);
    return e;
}

SplitForm V_prime_local(const GluedMetric& g, cplx zeta, cplx b1, cplx m1) {
    SplitForm f;
    if (b1 == cplx(0.0) && m1 == cplx(0.0)) return f;
    const double rho = std::abs(zeta);
    const cplx ghat = std::conj(m1) * std::conj(zeta) / rho;
    f.dzbar.x1 = ghat;
    const double c = g.schedule().chi(flat_d(rho));
    if (c == 0.0) return f;
    const cplx B = std::conj(b1) * std::conj(zeta) / rho;
    const double w = g.gauge(rho);
    const double sh = std::sinh(w), S2 = std::sinh(2 * w), C2 = std::cosh(2 * w);
    const cplx dc = dchi_bar(g.schedule(), zeta), dw = g.dgauge_bar(zeta);
    f.dz.y0 = 2 * kC * kC * g.t() * c * std::conj(b1) * rho * S2;
    f.dzbar.dx1 = dc * B * (2 * sh * sh) + c * (ghat * (2 * sh * sh) + 2.0 * B * dw * S2);
    f.dzbar.y1 = -dc * B * S2 + c * (-ghat * S2 - 2.0 * B * dw * C2);
    return f;
}

namespace {

/// Chart data of `form` at z when z lies inside X1.
std::optional<ChartPoint> chart_point(const GluedMetric& g, const HolDifferential& form, cplx z) {
    const auto hit = g.locate(z);
    if (!hit) return std::nullopt;
    const auto& [i, zeta, dzeta] = *hit;
    if (zeta == cplx(0.0)) throw FrameError("primed forms: evaluation at a zero");
    const auto& c = g.charts()[i];
    const ZeroChart local(g.phi(), c.zero(), c.flat_radius(), {form});
    const double rho[] = {std::abs(zeta)};
    return local.ray(std::arg(zeta), rho).front();
}

}  // namespace

FormValue H_prime(const GluedMetric& g, const HolDifferential& nu, cplx z) {
    const QuadraticDifferential& phi = g.phi();
    if (const auto p = chart_point(g, nu, z)) {
        return to_global(to_matrices(H_prime_local(g, p->zeta, p->alpha1[0], p->g1[0]), p->zeta), p->dz);
    }
    FormValue v;
    v.dz = global_higgs(phi, z) * (nu.numerator(z) / phi.p(z));
    return v;
}

FormValue V_prime(const GluedMetric& g, const HolDifferential& mu, cplx z) {
    const QuadraticDifferential& phi = g.phi();
    if (const auto p = chart_point(g, mu, z)) {
        return to_global(to_matrices(V_prime_local(g, p->zeta, p->alpha1[0], p->g1[0]), p->zeta), p->dz);
    }
    FormValue v;
    const Mat2 Fmu = global_higgs(phi, z) * (mu.numerator(z) / phi.p(z));
    v.dzbar = adjoint(Fmu, limiting_metric(phi, z));
    return v;
}

}  // namespace sfl
