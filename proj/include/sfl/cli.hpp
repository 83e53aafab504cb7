#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sfl/localmodel.hpp"

namespace sfl::cli {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

struct Tolerances {
    double profile = 1e-9;      ///< radial profile solve
    double newton = 1e-9;       ///< disc Newton solves
    double quadrature = 1e-9;   ///< relative tolerance of the spectral quadratures
};

struct ThresholdConfig {
    double cutoff = 10.0;       ///< saddle connections longer than this are not searched
    int resolution = 256;       ///< sweep angles per zero
};

struct ModelConfig {
    std::vector<double> t{1.0, 2.0, 4.0};
    double r_max = 6.0;
    std::size_t cells = 60000;
    std::size_t samples = 200;  ///< rows per t in the profile table
};

struct DecayConfig {
    double radius = 6.0;
    double amplitude = 0.1;        ///< off-diagonal boundary amplitude
    double diag_amplitude = 0.2;   ///< log-amplitude of the diagonal boundary data (general case)
    std::size_t divisions = 128;   ///< h = radius / divisions
    double fit_inner = 1.5;        ///< fit annulus, as |z|
    double fit_outer = 4.5;
};

struct PeriodsConfig {
    std::vector<std::vector<cplx>> forms;   ///< numerators of q dz / xi; empty: monomial basis
    double radius = 0.0;                    ///< inner quadrature disc; 0 picks the default
};

struct AuxgramConfig {
    std::vector<std::vector<cplx>> forms;
    std::vector<cplx> eta{1.0};             ///< eta = r(z) dz / xi
    std::vector<double> t;                  ///< smallness sweep; empty skips it
    double rate = 1.0;                      ///< eta scaled by exp(-rate t) in the sweep
};

struct CompareConfig {
    double kappa_fraction = 0.5;            ///< kappa = fraction * kappa0 unless kappa is set
    std::optional<double> kappa;
    std::vector<double> t{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<cplx> nu{1.0};
    std::vector<cplx> mu{0.0, 1.0};
    std::vector<cplx> eta;                  ///< empty: eta = 0
    std::size_t angles = 64;
    std::size_t panels = 6;
};

struct VerifyConfig {
    std::vector<int> criteria;              ///< empty: all
};

struct RunConfig {
    std::string command;
    std::vector<cplx> polynomial{-1.0, 0.0, 1.0};   ///< p(z), lowest degree first
    Tolerances tol;
    ThresholdConfig threshold;
    ModelConfig model;
    DecayConfig decay;
    PeriodsConfig periods;
    AuxgramConfig auxgram;
    CompareConfig compare;
    VerifyConfig verify;
    std::filesystem::path out_dir = ".";
    unsigned jobs = 1;
    unsigned seed = 7;
};

/// Parses a YAML document over the defaults; unknown keys and malformed values raise InputError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Checks the invariants that do not need a computation (grids increasing, sizes positive).
void validate(const RunConfig& cfg);

/// Every field that can change a result; excludes output paths and the worker count.
json to_json(const RunConfig& cfg);
/// SHA-256 of the compact dump of `to_json(cfg)`, hex.
std::string config_hash(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Reports

struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::string command;
    json result;
    std::vector<CsvTable> tables;
    int exit_code = 0;
};

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_text(const CsvTable& t);
/// Round-trip decimal text of a double.
std::string fmt(double x);
/// [re, im].
json cjson(cplx z);
/// Finite numbers as numbers, the rest as "inf", "-inf" or "nan".
json num(double x);

/// Writes `<out>/<command>.json` and `<out>/<command>_<table>.csv`.
void write_report(const Report& r, const RunConfig& cfg);
/// JSON written in place of a report when the command fails.
void write_failure(const RunConfig& cfg, int exit_code, const std::string& message);

/// 2 input, 3 solver, 4 schedule or threshold.
int exit_code_for(const std::exception& e);

// ---------------------------------------------------------------------------
// Commands

Report run_threshold(const RunConfig& cfg);
Report run_model(const RunConfig& cfg);
Report run_decay(const RunConfig& cfg);
Report run_periods(const RunConfig& cfg);
Report run_auxgram(const RunConfig& cfg);
Report run_compare(const RunConfig& cfg);
Report run_verify_all(const RunConfig& cfg);
Report run_command(const RunConfig& cfg);

const std::vector<std::string>& command_names();

/// Slope of -log|v| against 4 t r^{3/2} over the outer half of the profile mesh, where the
/// linearized far field applies; 1 up to the algebraic prefactor.
double far_field_slope(const ModelMetricProfile& p);

// ---------------------------------------------------------------------------
// Acceptance criteria

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;     ///< measured values against the pinned tolerances
    json values;
    double seconds = 0.0;   ///< wall time; kept out of the JSON reports
};

constexpr int kCriteria = 12;

/// Runs the selected criteria (all when empty) in order.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, unsigned seed);

}  // namespace sfl::cli
