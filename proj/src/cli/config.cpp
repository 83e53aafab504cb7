#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "sfl/cli.hpp"

namespace sfl::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw InputError("config: " + key + ": " + what);
}

/// Rejects keys of a mapping outside `known`.
void check_keys(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> known) {
    if (!n.IsMap()) bad(where, "expected a table");
    const std::set<std::string> ok(known.begin(), known.end());
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (!ok.count(k)) bad(where.empty() ? k : where + "." + k, "unknown key");
    }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) bad(key, "expected a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        bad(key, "cannot read '" + n.Scalar() + "'");
    }
}

std::size_t count(const YAML::Node& n, const std::string& key) {
    const long v = scalar<long>(n, key);
    if (v < 0) bad(key, "must be non-negative");
    return static_cast<std::size_t>(v);
}

/// A number or [re, im].
cplx complex_value(const YAML::Node& n, const std::string& key) {
    if (n.IsScalar()) return scalar<double>(n, key);
    if (n.IsSequence() && n.size() == 2) return {scalar<double>(n[0], key), scalar<double>(n[1], key)};
    bad(key, "expected a number or [re, im]");
}

std::vector<cplx> complex_list(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) bad(key, "expected a list");
    std::vector<cplx> out;
    for (const auto& e : n) out.push_back(complex_value(e, key));
    return out;
}

std::vector<double> real_list(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) bad(key, "expected a list");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(scalar<double>(e, key));
    return out;
}

std::vector<std::vector<cplx>> form_list(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) bad(key, "expected a list of coefficient lists");
    std::vector<std::vector<cplx>> out;
    for (const auto& e : n) out.push_back(complex_list(e, key));
    return out;
}

template <class F>
void with(const YAML::Node& parent, const char* key, F&& f) {
    if (const YAML::Node n = parent[key]) f(n);
}

void increasing(const std::vector<double>& t, const std::string& key, bool allow_empty) {
    if (t.empty() && !allow_empty) bad(key, "empty grid");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(t[k])) bad(key, "non-finite value");
        if (k > 0 && !(t[k] > t[k - 1])) bad(key, "grid must be strictly increasing");
    }
}

json forms_json(const std::vector<std::vector<cplx>>& f) {
    json a = json::array();
    for (const auto& q : f) {
        json row = json::array();
        for (cplx c : q) row.push_back(cjson(c));
        a.push_back(row);
    }
    return a;
}

json clist(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx c : v) a.push_back(cjson(c));
    return a;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    RunConfig c;
    if (root.IsNull()) return c;
    check_keys(root, "", {"polynomial", "seed", "tolerances", "threshold", "model", "decay", "periods",
                          "auxgram", "compare", "verify", "output"});
    with(root, "polynomial", [&](const YAML::Node& n) { c.polynomial = complex_list(n, "polynomial"); });
    with(root, "seed", [&](const YAML::Node& n) { c.seed = static_cast<unsigned>(count(n, "seed")); });
    with(root, "tolerances", [&](const YAML::Node& n) {
        check_keys(n, "tolerances", {"profile", "newton", "quadrature"});
        with(n, "profile", [&](const YAML::Node& v) { c.tol.profile = scalar<double>(v, "tolerances.profile"); });
        with(n, "newton", [&](const YAML::Node& v) { c.tol.newton = scalar<double>(v, "tolerances.newton"); });
        with(n, "quadrature", [&](const YAML::Node& v) { c.tol.quadrature = scalar<double>(v, "tolerances.quadrature"); });
    });
    with(root, "threshold", [&](const YAML::Node& n) {
        check_keys(n, "threshold", {"cutoff", "resolution"});
        with(n, "cutoff", [&](const YAML::Node& v) { c.threshold.cutoff = scalar<double>(v, "threshold.cutoff"); });
        with(n, "resolution", [&](const YAML::Node& v) { c.threshold.resolution = scalar<int>(v, "threshold.resolution"); });
    });
    with(root, "model", [&](const YAML::Node& n) {
        check_keys(n, "model", {"t", "r_max", "cells", "samples"});
        with(n, "t", [&](const YAML::Node& v) { c.model.t = real_list(v, "model.t"); });
        with(n, "r_max", [&](const YAML::Node& v) { c.model.r_max = scalar<double>(v, "model.r_max"); });
        with(n, "cells", [&](const YAML::Node& v) { c.model.cells = count(v, "model.cells"); });
        with(n, "samples", [&](const YAML::Node& v) { c.model.samples = count(v, "model.samples"); });
    });
    with(root, "decay", [&](const YAML::Node& n) {
        check_keys(n, "decay", {"radius", "amplitude", "diag_amplitude", "divisions", "fit_inner", "fit_outer"});
        auto& d = c.decay;
        with(n, "radius", [&](const YAML::Node& v) { d.radius = scalar<double>(v, "decay.radius"); });
        with(n, "amplitude", [&](const YAML::Node& v) { d.amplitude = scalar<double>(v, "decay.amplitude"); });
        with(n, "diag_amplitude", [&](const YAML::Node& v) { d.diag_amplitude = scalar<double>(v, "decay.diag_amplitude"); });
        with(n, "divisions", [&](const YAML::Node& v) { d.divisions = count(v, "decay.divisions"); });
        with(n, "fit_inner", [&](const YAML::Node& v) { d.fit_inner = scalar<double>(v, "decay.fit_inner"); });
        with(n, "fit_outer", [&](const YAML::Node& v) { d.fit_outer = scalar<double>(v, "decay.fit_outer"); });
    });
    with(root, "periods", [&](const YAML::Node& n) {
        check_keys(n, "periods", {"forms", "radius"});
        with(n, "forms", [&](const YAML::Node& v) { c.periods.forms = form_list(v, "periods.forms"); });
        with(n, "radius", [&](const YAML::Node& v) { c.periods.radius = scalar<double>(v, "periods.radius"); });
    });
    with(root, "auxgram", [&](const YAML::Node& n) {
        check_keys(n, "auxgram", {"forms", "eta", "t", "rate"});
        with(n, "forms", [&](const YAML::Node& v) { c.auxgram.forms = form_list(v, "auxgram.forms"); });
        with(n, "eta", [&](const YAML::Node& v) { c.auxgram.eta = complex_list(v, "auxgram.eta"); });
        with(n, "t", [&](const YAML::Node& v) { c.auxgram.t = real_list(v, "auxgram.t"); });
        with(n, "rate", [&](const YAML::Node& v) { c.auxgram.rate = scalar<double>(v, "auxgram.rate"); });
    });
    with(root, "compare", [&](const YAML::Node& n) {
        check_keys(n, "compare", {"kappa_fraction", "kappa", "t", "nu", "mu", "eta", "angles", "panels"});
        auto& m = c.compare;
        with(n, "kappa_fraction", [&](const YAML::Node& v) { m.kappa_fraction = scalar<double>(v, "compare.kappa_fraction"); });
        with(n, "kappa", [&](const YAML::Node& v) { m.kappa = scalar<double>(v, "compare.kappa"); });
        with(n, "t", [&](const YAML::Node& v) { m.t = real_list(v, "compare.t"); });
        with(n, "nu", [&](const YAML::Node& v) { m.nu = complex_list(v, "compare.nu"); });
        with(n, "mu", [&](const YAML::Node& v) { m.mu = complex_list(v, "compare.mu"); });
        with(n, "eta", [&](const YAML::Node& v) { m.eta = complex_list(v, "compare.eta"); });
        with(n, "angles", [&](const YAML::Node& v) { m.angles = count(v, "compare.angles"); });
        with(n, "panels", [&](const YAML::Node& v) { m.panels = count(v, "compare.panels"); });
    });
    with(root, "verify", [&](const YAML::Node& n) {
        check_keys(n, "verify", {"criteria"});
        with(n, "criteria", [&](const YAML::Node& v) {
            if (!v.IsSequence()) bad("verify.criteria", "expected a list");
            for (const auto& e : v) c.verify.criteria.push_back(scalar<int>(e, "verify.criteria"));
        });
    });
    with(root, "output", [&](const YAML::Node& n) {
        check_keys(n, "output", {"dir"});
        with(n, "dir", [&](const YAML::Node& v) { c.out_dir = scalar<std::string>(v, "output.dir"); });
    });
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& c) {
    if (c.polynomial.empty()) bad("polynomial", "no coefficients");
    for (cplx z : c.polynomial)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) bad("polynomial", "non-finite coefficient");
    if (c.polynomial.back() == cplx(0.0)) bad("polynomial", "leading coefficient is zero");
    for (double v : {c.tol.profile, c.tol.newton, c.tol.quadrature})
        if (!(v > 0.0)) bad("tolerances", "must be positive");
    if (!(c.threshold.cutoff > 0.0)) bad("threshold.cutoff", "must be positive");
    if (c.threshold.resolution < 8) bad("threshold.resolution", "need at least 8 angles");
    increasing(c.model.t, "model.t", false);
    if (!(c.model.r_max > 0.0)) bad("model.r_max", "must be positive");
    if (c.model.cells < 16) bad("model.cells", "need at least 16 cells");
    if (c.model.samples < 1) bad("model.samples", "need at least one row");
    const auto& d = c.decay;
    if (!(d.radius > 0.0)) bad("decay.radius", "must be positive");
    if (d.divisions < 8) bad("decay.divisions", "need at least 8 divisions");
    if (!(0.0 <= d.fit_inner && d.fit_inner < d.fit_outer && d.fit_outer < d.radius))
        bad("decay.fit_inner", "need 0 <= fit_inner < fit_outer < radius");
    if (!std::isfinite(d.amplitude) || !std::isfinite(d.diag_amplitude)) bad("decay.amplitude", "non-finite");
    increasing(c.auxgram.t, "auxgram.t", true);
    if (!(c.auxgram.rate > 0.0)) bad("auxgram.rate", "must be positive");
    increasing(c.compare.t, "compare.t", false);
    if (!(c.compare.kappa_fraction > 0.0 && c.compare.kappa_fraction < 1.0))
        bad("compare.kappa_fraction", "must lie in (0, 1)");
    if (c.compare.angles < 8 || c.compare.panels < 1) bad("compare.angles", "too few quadrature nodes");
    for (int id : c.verify.criteria)
        if (id < 1 || id > kCriteria) bad("verify.criteria", "unknown criterion " + std::to_string(id));
    if (c.jobs < 1) bad("jobs", "need at least one worker");
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["polynomial"] = clist(c.polynomial);
    j["seed"] = c.seed;
    j["tolerances"] = {{"profile", c.tol.profile}, {"newton", c.tol.newton}, {"quadrature", c.tol.quadrature}};
    j["threshold"] = {{"cutoff", c.threshold.cutoff}, {"resolution", c.threshold.resolution}};
    j["model"] = {{"t", c.model.t}, {"r_max", c.model.r_max}, {"cells", c.model.cells}, {"samples", c.model.samples}};
    j["decay"] = {{"radius", c.decay.radius},       {"amplitude", c.decay.amplitude},
                  {"diag_amplitude", c.decay.diag_amplitude}, {"divisions", c.decay.divisions},
                  {"fit_inner", c.decay.fit_inner}, {"fit_outer", c.decay.fit_outer}};
    j["periods"] = {{"forms", forms_json(c.periods.forms)}, {"radius", c.periods.radius}};
    j["auxgram"] = {{"forms", forms_json(c.auxgram.forms)}, {"eta", clist(c.auxgram.eta)},
                    {"t", c.auxgram.t}, {"rate", c.auxgram.rate}};
    j["compare"] = {{"kappa_fraction", c.compare.kappa_fraction},
                    {"kappa", c.compare.kappa ? json(*c.compare.kappa) : json(nullptr)},
                    {"t", c.compare.t}, {"nu", clist(c.compare.nu)}, {"mu", clist(c.compare.mu)},
                    {"eta", clist(c.compare.eta)}, {"angles", c.compare.angles}, {"panels", c.compare.panels}};
    j["verify"] = {{"criteria", c.verify.criteria}};
    return j;
}

std::string config_hash(const RunConfig& c) {
    const std::string s = to_json(c).dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("config_hash: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace sfl::cli
