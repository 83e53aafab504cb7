#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Cholesky>

#include "sfl/approxforms.hpp"
#include "sfl/cli.hpp"

namespace sfl::cli {

namespace {

/// f(0), ..., f(n - 1) on up to `jobs` threads; results in index order, first error rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, F&& f) {
    std::vector<T> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    const auto work = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!err) err = std::current_exception();
            }
        }
    };
    const unsigned k = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < k; ++j) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return out;
}

json fit_json(const DecayFit& f) {
    return {{"rate", num(f.rate)}, {"intercept", num(f.intercept)}, {"residual", num(f.residual)}, {"count", f.count}};
}

json matrix_json(const Eigen::MatrixXcd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cjson(m(i, j)));
        a.push_back(row);
    }
    return a;
}

void matrix_rows(CsvTable& t, const std::string& scheme, const std::string& block, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            t.rows.push_back({scheme, block, std::to_string(i), std::to_string(j), fmt(m(i, j).real()),
                              fmt(m(i, j).imag())});
}

std::vector<HolDifferential> basis_of(const SpectralCurve& curve, const std::vector<std::vector<cplx>>& forms) {
    std::vector<HolDifferential> b;
    if (forms.empty()) {
        b = canonical_basis(curve);
    } else {
        for (const auto& q : forms) b.push_back(HolDifferential{q});
    }
    if (b.empty()) throw InputError("the curve carries no holomorphic differentials (genus 0)");
    return b;
}

Mat2 general_boundary(const DecayConfig& d, cplx z) {
    const double th = std::arg(z);
    const cplx b = d.amplitude * std::polar(1.0, 2.0 * th + 0.3);
    const double a = std::exp(d.diag_amplitude * std::cos(th));
    Mat2 H;
    H << a, b, std::conj(b), (1.0 + std::norm(b)) / a;
    return H;
}

/// Max |b| per radial bin of width h.
template <class Abs>
void radial_rows(CsvTable& t, const std::string& name, const Grid2D& g, Abs&& absb) {
    const double h = g.spacing();
    const auto bins = static_cast<std::size_t>(std::ceil(g.region().r_out / h)) + 1;
    std::vector<double> mx(bins, -1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::abs(g.node(i).z) / h);
        mx[std::min(k, bins - 1)] = std::max(mx[std::min(k, bins - 1)], absb(i));
    }
    for (std::size_t k = 0; k < bins; ++k)
        if (mx[k] >= 0.0) t.rows.push_back({name, fmt((k + 0.5) * h), fmt(mx[k])});
}

json pairing_fit_json(const std::optional<DecayFit>& f, double kappa) {
    if (!f) return "exact zero";
    json j = fit_json(*f);
    j["meets_4kappa"] = f->rate >= 4 * kappa;
    j["meets_8kappa"] = f->rate >= 8 * kappa;
    return j;
}

}  // namespace

double far_field_slope(const ModelMetricProfile& p) {
    const double xmax = 4 * p.t * std::pow(p.r_max, 1.5);
    std::vector<std::pair<double, double>> s;
    for (std::size_t i = p.v.size() / 2; i + 1 < p.v.size(); ++i) {
        const double x = 4 * p.t * std::pow(p.psi.r[i], 1.5);
        if (x < xmax - 8 && p.v[i] != 0.0) s.emplace_back(x, std::abs(p.v[i]));
    }
    if (s.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_decay_rate(s).rate;
}

// ---------------------------------------------------------------------------

Report run_threshold(const RunConfig& cfg) {
    const QuadraticDifferential phi(cfg.polynomial);
    const auto zs = zeros(phi);
    SweepOptions so;
    so.resolution = cfg.threshold.resolution;
    const auto conns = saddle_connections(phi, cfg.threshold.cutoff, so);
    const Threshold th = threshold(phi, cfg.threshold.cutoff, so);

    Report r;
    r.command = "threshold";
    CsvTable zt{"zeros", {"index", "re", "im", "flat_radius"}, {}};
    for (std::size_t i = 0; i < zs.size(); ++i)
        zt.rows.push_back({std::to_string(i), fmt(zs[i].location.real()), fmt(zs[i].location.imag()),
                           fmt(zs[i].flat_radius)});
    CsvTable ct{"connections", {"start", "end", "start_re", "start_im", "end_re", "end_im", "angle", "length"}, {}};
    for (const auto& c : conns)
        ct.rows.push_back({std::to_string(c.start), std::to_string(c.end), fmt(c.start_point.real()),
                           fmt(c.start_point.imag()), fmt(c.end_point.real()), fmt(c.end_point.imag()),
                           fmt(c.angle), fmt(c.length)});
    r.tables = {zt, ct};

    json zj = json::array();
    for (const auto& z : zs) zj.push_back(cjson(z.location));
    r.result["zeros"] = zj;
    r.result["connections"] = conns.size();
    r.result["cutoff"] = th.cutoff;
    r.result["resolution"] = th.resolution;
    if (th.value) {
        r.result["threshold"] = *th.value;
        r.result["kappa0"] = *th.value / 2;
        r.result["witness"] = {{"start", th.witness->start}, {"end", th.witness->end}, {"angle", th.witness->angle}};
    } else {
        r.result["threshold"] = "none below cutoff";
        r.result["kappa0"] = nullptr;
    }
    return r;
}

Report run_model(const RunConfig& cfg) {
    const auto& m = cfg.model;
    ProfileOptions po;
    po.cells = m.cells;
    po.tol = cfg.tol.profile;
    const auto profiles = parallel_map<ModelMetricProfile>(
        m.t.size(), cfg.jobs, [&](std::size_t i) { return painleve_profile(m.t[i], m.r_max, po); });

    Report r;
    r.command = "model";
    CsvTable pt{"profile", {"t", "r", "psi", "v", "dv"}, {}};
    json rows = json::array();
    for (const auto& p : profiles) {
        for (std::size_t k = 1; k <= m.samples; ++k) {
            const double x = m.r_max * static_cast<double>(k) / m.samples;
            pt.rows.push_back({fmt(p.t), fmt(x), fmt(p.psi_at(x)), fmt(p.v_at(x)), fmt(p.dv_at(x))});
        }
        rows.push_back({{"t", p.t},
                        {"psi0", p.psi_at(0.0)},
                        {"residual", p.residual},
                        {"pointwise", p.pointwise},
                        {"iterations", p.iterations},
                        {"far_field_slope", num(far_field_slope(p))}});
    }
    // v_t(r) = v_{t0}((t / t0)^{2/3} r) away from the outer boundary
    json scaling = json::array();
    const auto& p0 = profiles.front();
    for (std::size_t i = 1; i < profiles.size(); ++i) {
        const double s = std::pow(profiles[i].t / p0.t, 2.0 / 3.0);
        double err = 0.0;
        for (double x = 0.05; x * s < m.r_max - 0.5; x += 0.01)
            err = std::max(err, std::abs(profiles[i].v_at(x) - p0.v_at(s * x)));
        scaling.push_back({{"t", profiles[i].t}, {"reference_t", p0.t}, {"max_deviation", err}});
    }
    r.result["profiles"] = rows;
    r.result["scaling"] = scaling;
    r.result["far_field_target"] = 1.0;
    r.tables = {pt};
    return r;
}

Report run_decay(const RunConfig& cfg) {
    const auto& d = cfg.decay;
    DiscOptions o;
    o.divisions = d.divisions;
    o.newton.tol = cfg.tol.newton;
    Report r;
    r.command = "decay";
    CsvTable rt{"radial", {"case", "r", "max_abs_b"}, {}};
    const auto cases = parallel_map<json>(2, cfg.jobs, [&](std::size_t k) -> json {
        json j;
        if (k == 0) {
            const auto f = solve_disc_symmetric(d.radius, [&](cplx) { return d.amplitude; }, o);
            const bool zero = std::all_of(f.bt.begin(), f.bt.end(), [](double b) { return b == 0.0; });
            j["case"] = "symmetric";
            j["exponent"] = zero ? json("exact zero field") : json(num(offdiag_decay(f, d.fit_inner, d.fit_outer).rate));
            j["rate_bound"] = 4.0;
            j["expected_range"] = {3.6, 4.0};
            j["newton"] = {{"iterations", f.report.iterations}, {"residual", f.report.residual}};
            const auto s = subsolution_check(f);
            j["subsolution"] = {{"max_violation", s.max_violation}, {"slack", s.slack}, {"checked", s.checked}};
            const double h = f.grid->spacing();
            j["barrier"] = {{"excess", barrier_excess(f)}, {"allowance", 10 * h * h}};
            CsvTable t;
            radial_rows(t, "symmetric", *f.grid, [&](std::size_t i) { return std::abs(f.bt[i]); });
            j["rows"] = t.rows;
        } else {
            const auto f = solve_disc_general(d.radius, [&](cplx z) { return general_boundary(d, z); }, o);
            bool zero = true;
            for (std::size_t i = 0; i < f.grid->size(); ++i) zero = zero && f.b(i) == cplx(0.0);
            j["case"] = "general";
            j["exponent"] = zero ? json("exact zero field") : json(num(offdiag_decay(f, d.fit_inner, d.fit_outer).rate));
            j["rate_bound"] = 2 * std::sqrt(2.0);
            j["expected_min"] = 2.69;
            j["newton"] = {{"iterations", f.report.iterations}, {"residual", f.report.residual}};
            const auto s = subsolution_check(f);
            j["subsolution"] = {{"max_violation", s.max_violation}, {"slack", s.slack}, {"checked", s.checked}};
            const auto e = energy_identity(f, 0.1 * d.radius);
            const double h = f.grid->spacing();
            j["energy_identity"] = {{"max_residual", e.max_residual}, {"allowance", 20 * h * h}, {"checked", e.checked}};
            CsvTable t;
            radial_rows(t, "general", *f.grid, [&](std::size_t i) { return std::abs(f.b(i)); });
            j["rows"] = t.rows;
        }
        return j;
    });
    for (auto c : cases) {
        for (const auto& row : c["rows"]) rt.rows.push_back(row.get<std::vector<std::string>>());
        c.erase("rows");
        r.result["cases"].push_back(c);
    }
    r.result["h"] = d.radius / static_cast<double>(d.divisions);
    r.tables = {rt};
    return r;
}

Report run_periods(const RunConfig& cfg) {
    const SpectralCurve curve{QuadraticDifferential(cfg.polynomial)};
    const auto basis = basis_of(curve, cfg.periods.forms);
    L2Options polar, cart;
    polar.radius = cart.radius = cfg.periods.radius;
    polar.tol = cart.tol = cfg.tol.quadrature;
    cart.scheme = QuadratureScheme::Cartesian;
    const auto g = parallel_map<GramBlocks>(2, cfg.jobs, [&](std::size_t k) {
        return semiflat_gram(curve, basis, basis, k == 0 ? polar : cart);
    });
    const Eigen::MatrixXcd P = g[0].full(), C = g[1].full();
    Report r;
    r.command = "periods";
    r.result["genus"] = curve.genus();
    r.result["forms"] = basis.size();
    r.result["polar"] = {{"hor", matrix_json(g[0].hor)}, {"ver", matrix_json(g[0].ver)}};
    r.result["cartesian"] = {{"hor", matrix_json(g[1].hor)}, {"ver", matrix_json(g[1].ver)}};
    r.result["scheme_relative_difference"] = (P - C).norm() / P.norm();
    r.result["hermitian_defect"] = (P - P.adjoint()).norm() / P.norm();
    r.result["positive_definite"] = Eigen::LLT<Eigen::MatrixXcd>(P).info() == Eigen::Success;
    CsvTable t{"gram", {"scheme", "block", "i", "j", "re", "im"}, {}};
    matrix_rows(t, "polar", "hor", g[0].hor);
    matrix_rows(t, "polar", "ver", g[0].ver);
    matrix_rows(t, "cartesian", "hor", g[1].hor);
    matrix_rows(t, "cartesian", "ver", g[1].ver);
    r.tables = {t};
    return r;
}

Report run_auxgram(const RunConfig& cfg) {
    const SpectralCurve curve{QuadraticDifferential(cfg.polynomial)};
    const auto basis = basis_of(curve, cfg.auxgram.forms);
    const AuxInput eta = AuxInput::from_form(curve, HolDifferential{cfg.auxgram.eta});
    const GramBlocks g = aux_gram(curve, basis, basis, eta);
    Report r;
    r.command = "auxgram";
    r.result["hor_ver"] = matrix_json(g.hor_ver);
    CsvTable t{"gram", {"block", "i", "j", "re", "im"}, {}};
    for (Eigen::Index i = 0; i < g.hor_ver.rows(); ++i)
        for (Eigen::Index j = 0; j < g.hor_ver.cols(); ++j)
            t.rows.push_back({"hor_ver", std::to_string(i), std::to_string(j), fmt(g.hor_ver(i, j).real()),
                              fmt(g.hor_ver(i, j).imag())});
    r.tables = {t};
    if (!cfg.auxgram.t.empty()) {
        L2Options o;
        o.tol = cfg.tol.quadrature;
        const double rate = cfg.auxgram.rate;
        const auto rep = aux_smallness_report(
            curve, basis, basis, [&](double s) { return eta.scaled(std::exp(-rate * s)); }, cfg.auxgram.t, o);
        CsvTable st{"smallness", {"t", "relative", "positive"}, {}};
        for (const auto& row : rep.rows)
            st.rows.push_back({fmt(row.t), fmt(row.relative), row.positive ? "true" : "false"});
        r.tables.push_back(st);
        r.result["smallness"] = {{"fit", fit_json(rep.fit)},
                                 {"expected_rate", rate},
                                 {"threshold", rep.threshold ? json(*rep.threshold) : json(nullptr)}};
    }
    return r;
}

Report run_compare(const RunConfig& cfg) {
    const QuadraticDifferential phi(cfg.polynomial);
    const SpectralCurve curve(phi);
    SweepOptions so;
    so.resolution = cfg.threshold.resolution;
    const Threshold th = threshold(phi, cfg.threshold.cutoff, so);
    if (!th.value) throw ScheduleError("compare: no saddle connection below the cutoff, threshold not finite");
    const auto& c = cfg.compare;
    const double kappa = c.kappa ? *c.kappa : c.kappa_fraction * (*th.value / 2);
    const CutoffSchedule s = CutoffSchedule::from_threshold(*th.value, kappa);
    const AuxInput eta = c.eta.empty() ? AuxInput::zero() : AuxInput::from_form(curve, HolDifferential{c.eta});
    PairingOptions po;
    po.spectral.tol = cfg.tol.quadrature;
    po.angles = c.angles;
    po.panels = c.panels;
    po.profile.tol = cfg.tol.profile;
    po.jobs = cfg.jobs;
    const auto rep = pairing_report(curve, HolDifferential{c.nu}, HolDifferential{c.mu}, eta, s, c.t, po);

    Report r;
    r.command = "compare";
    r.result["threshold"] = *th.value;
    r.result["schedule"] = {{"kappa0", s.kappa0}, {"kappa", s.kappa}, {"delta", s.delta}};
    r.result["four_kappa"] = 4 * s.kappa;
    r.result["eight_kappa"] = 8 * s.kappa;
    r.result["region_radius"] = rep.region_radius;
    r.result["fits"] = {{"HH", pairing_fit_json(rep.fits.HH, s.kappa)},
                        {"VV", pairing_fit_json(rep.fits.VV, s.kappa)},
                        {"HV", pairing_fit_json(rep.fits.HV, s.kappa)}};
    CsvTable t{"pairings",
               {"t", "pair_HH_re", "pair_HH_im", "target_HH_re", "target_HH_im", "diff_HH", "pair_VV_re",
                "pair_VV_im", "target_VV_re", "target_VV_im", "diff_VV", "pair_HV_re", "pair_HV_im",
                "target_HV_re", "target_HV_im", "diff_HV"},
               {}};
    for (const auto& row : rep.rows) {
        t.rows.push_back({fmt(row.t), fmt(row.pair_HH.real()), fmt(row.pair_HH.imag()), fmt(row.target_HH.real()),
                          fmt(row.target_HH.imag()), fmt(row.diff_HH), fmt(row.pair_VV.real()),
                          fmt(row.pair_VV.imag()), fmt(row.target_VV.real()), fmt(row.target_VV.imag()),
                          fmt(row.diff_VV), fmt(row.pair_HV.real()), fmt(row.pair_HV.imag()),
                          fmt(row.target_HV.real()), fmt(row.target_HV.imag()), fmt(row.diff_HV)});
    }
    r.tables = {t};
    return r;
}

Report run_verify_all(const RunConfig& cfg) {
    const auto results = run_criteria(cfg.verify.criteria, cfg.seed);
    Report r;
    r.command = "verify-all";
    CsvTable t{"criteria", {"id", "name", "pass", "detail"}, {}};
    bool all = true;
    json list = json::array();
    for (const auto& c : results) {
        all = all && c.pass;
        list.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"values", c.values}});
        t.rows.push_back({std::to_string(c.id), c.name, c.pass ? "pass" : "fail", c.detail});
    }
    r.result["criteria"] = list;
    r.result["all_pass"] = all;
    r.tables = {t};
    r.exit_code = all ? 0 : 1;
    return r;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"threshold", "model", "decay", "periods",
                                                "auxgram", "compare", "verify-all"};
    return names;
}

Report run_command(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.command == "threshold") return run_threshold(cfg);
    if (cfg.command == "model") return run_model(cfg);
    if (cfg.command == "decay") return run_decay(cfg);
    if (cfg.command == "periods") return run_periods(cfg);
    if (cfg.command == "auxgram") return run_auxgram(cfg);
    if (cfg.command == "compare") return run_compare(cfg);
    if (cfg.command == "verify-all") return run_verify_all(cfg);
    throw InputError("unknown command '" + cfg.command + "'");
}

}  // namespace sfl::cli
