#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "sfl/approxforms.hpp"

namespace sfl {

namespace {

using GL = boost::math::quadrature::gauss<double, 16>;

bool is_zero(const HolDifferential& f) {
    return std::all_of(f.q.begin(), f.q.end(), [](cplx c) { return c == cplx(0.0); });
}

/// Chart samples shared by every t: the circle |zeta| = r2 and the glue annulus r2 < |zeta| < r1.
struct ZeroSamples {
    std::vector<ChartPoint> circle;                 ///< uniform in angle
    std::vector<std::vector<ChartPoint>> rays;      ///< per angle, at the radial nodes
    std::vector<double> rho, weight;                ///< radial nodes and Gauss weights times rho
};

ZeroSamples sample_zero(const ZeroChart& chart, const CutoffSchedule& s, const PairingOptions& opt, double R) {
    ZeroSamples z;
    const double r2 = std::pow(s.inner(), 2.0 / 3.0), r1 = std::pow(s.outer(), 2.0 / 3.0);
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    for (std::size_t k = 0; k < opt.panels; ++k) {
        const double a = r2 + (r1 - r2) * k / opt.panels, b = r2 + (r1 - r2) * (k + 1) / opt.panels;
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t j = xs.size(); j-- > 0;) {
            z.rho.push_back(m - h * xs[j]);
            z.weight.push_back(h * ws[j] * z.rho.back());
        }
        for (std::size_t j = 0; j < xs.size(); ++j) {
            z.rho.push_back(m + h * xs[j]);
            z.weight.push_back(h * ws[j] * z.rho.back());
        }
    }
    std::vector<double> radii = z.rho;
    radii.push_back(r1);
    for (std::size_t k = 0; k < opt.angles; ++k) {
        const double arg = 2 * M_PI * static_cast<double>(k) / opt.angles;
        const double c[] = {r2};
        z.circle.push_back(chart.ray(arg, c).front());
        auto pts = chart.ray(arg, radii);
        if (std::abs(pts.back().z) >= R)
            throw RegionError("pairing_report: a glue annulus leaves the region |z| < R");
        pts.pop_back();
        z.rays.push_back(std::move(pts));
    }
    return z;
}

struct Diffs {
    cplx HH = 0.0, VV = 0.0, HV = 0.0;
};

/// Differences (H', H') - ||nu||^2 etc. on one chart; X2 by contour integrals, the glue by area.
Diffs chart_diffs(const GluedMetric& g, const ZeroSamples& zs, const PairingOptions& opt) {
    const cplx I(0.0, 1.0);
    const double r2 = std::pow(g.schedule().inner(), 2.0 / 3.0);
    const double dth = 2 * M_PI / static_cast<double>(opt.angles);
    const double w2 = g.profile().v_at(r2);
    Diffs d;
    cplx cHH = 0.0, cVV = 0.0, cHV = 0.0;
    for (const auto& p : zs.circle) {
        SplitEnd a;
        a.x1 = p.alpha1[0];
        const SplitForm h = H_model(g.profile(), p.zeta, p.alpha1[0], p.g1[0]);
        const SplitForm v = V_prime_local(g, p.zeta, p.alpha1[1], p.g1[1]);
        const SplitEnd G = F_dagger_local(g, p.zeta, p.alpha1[1]);
        const cplx dzbar = -I * std::conj(p.zeta) * dth, dz = I * p.zeta * dth;
        cHH += split_trace_shift(a, h.dz, r2, w2) * dzbar;
        cVV += split_trace_shift(G, v.dzbar, r2, w2) * dz;
        cHV += split_trace(a, v.dz, r2, w2) * dzbar;
    }
    d.HH = 2.0 * I * cHH;
    d.VV = -2.0 * I * cVV;
    d.HV = 2.0 * I * cHV;
    cplx aHH = 0.0, aVV = 0.0, aHV = 0.0;
    for (const auto& ray : zs.rays) {
        for (std::size_t j = 0; j < ray.size(); ++j) {
            const auto& p = ray[j];
            const double rho = zs.rho[j], w = g.gauge(rho), wt = zs.weight[j] * dth;
            const SplitForm h = H_prime_local(g, p.zeta, p.alpha1[0], p.g1[0]);
            const SplitForm v = V_prime_local(g, p.zeta, p.alpha1[1], p.g1[1]);
            aHH += wt * (split_trace_shift(h.dz, h.dz, rho, w) + split_trace_shift(h.dzbar, h.dzbar, rho, w));
            aVV += wt * (split_trace_shift(v.dz, v.dz, rho, w) + split_trace_shift(v.dzbar, v.dzbar, rho, w));
            aHV += wt * (split_trace(h.dz, v.dz, rho, w) + split_trace(h.dzbar, v.dzbar, rho, w));
        }
    }
    d.HH += 4.0 * aHH;
    d.VV += 4.0 * aVV;
    d.HV += 4.0 * aHV;
    return d;
}

std::optional<DecayFit> fit_rows(const std::vector<PairingRow>& rows, double PairingRow::*diff) {
    std::vector<std::pair<double, double>> s;
    for (const auto& r : rows)
        if (r.*diff > 0.0) s.emplace_back(r.t, r.*diff);
    if (s.size() < 2) return std::nullopt;
    return fit_decay_rate(s);
}

}  // namespace

PairingReport pairing_report(const SpectralCurve& curve, const HolDifferential& nu, const HolDifferential& mu,
                             const AuxInput& eta, const CutoffSchedule& schedule, std::span<const double> ts,
                             const PairingOptions& opt) {
    if (ts.empty()) throw InputError("pairing_report: empty t grid");
    for (double t : ts)
        if (!(t >= 1.0)) throw PreconditionError("pairing_report: need t >= 1");
    if (opt.angles < 8 || opt.panels < 1) throw InputError("pairing_report: too few quadrature nodes");
    const auto& phi = curve.phi();

    PairingReport rep;
    rep.schedule = schedule;
    double R = opt.spectral.radius;
    if (!(R > 0.0)) {
        R = 0.0;
        for (const auto& P : curve.branch_points()) R = std::max(R, std::abs(P.location));
        R = 2 * R + 1;
    }
    rep.region_radius = R;

    L2Options o = opt.spectral;
    o.radius = R;
    o.interior_only = true;
    const cplx tHH = is_zero(nu) ? cplx(0.0) : l2_pairing_hol(curve, nu, nu, o).interior;
    const cplx tVV = is_zero(mu) ? cplx(0.0) : l2_pairing_antihol(curve, mu, mu, o).interior;
    const cplx tHV = aux_pairing(curve, nu, mu, eta);

    // Validates the schedule before any chart work.
    const GluedMetric first(phi, ts[0], schedule, opt.profile);
    std::vector<ZeroSamples> samples;
    for (const auto& c : first.charts()) {
        const ZeroChart chart(phi, c.zero(), schedule.kappa0, {nu, mu});
        samples.push_back(sample_zero(chart, schedule, opt, R));
    }

    rep.rows.resize(ts.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    const auto work = [&]() {
        for (std::size_t i = next++; i < ts.size(); i = next++) {
            try {
                const GluedMetric g(phi, ts[i], schedule, opt.profile);
                Diffs d;
                for (const auto& zs : samples) {
                    const Diffs e = chart_diffs(g, zs, opt);
                    d.HH += e.HH;
                    d.VV += e.VV;
                    d.HV += e.HV;
                }
                PairingRow& r = rep.rows[i];
                r.t = ts[i];
                r.target_HH = tHH;
                r.target_VV = tVV;
                r.target_HV = tHV;
                r.pair_HH = tHH + d.HH;
                r.pair_VV = tVV + d.VV;
                // outside X1 the pair has no (H', V') contribution: the types differ
                r.pair_HV = d.HV;
                r.diff_HH = std::abs(d.HH);
                r.diff_VV = std::abs(d.VV);
                r.diff_HV = std::abs(r.pair_HV - tHV);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(ts.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);

    rep.fits.HH = fit_rows(rep.rows, &PairingRow::diff_HH);
    rep.fits.VV = fit_rows(rep.rows, &PairingRow::diff_VV);
    rep.fits.HV = fit_rows(rep.rows, &PairingRow::diff_HV);
    return rep;
}

}  // namespace sfl
