#include <cmath>
#include <cstdio>
#include <fstream>

#include "sfl/cli.hpp"

namespace sfl::cli {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::string csv_text(const CsvTable& t) {
    std::string out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += csv_field(cells[k]);
        }
        out += "\r\n";
    };
    line(t.header);
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw NumericalError("csv: row width differs from the header");
        line(r);
    }
    return out;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json cjson(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json num(double x) {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
    if (!out) throw InputError("cannot write " + p.string());
}

json envelope(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["config_hash"] = config_hash(cfg);
    j["config"] = to_json(cfg);
    j["tolerances"] = to_json(cfg)["tolerances"];
    return j;
}

}  // namespace

void write_report(const Report& r, const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    json j = envelope(cfg);
    j["status"] = r.exit_code == 0 ? "ok" : "failed";
    j["exit_code"] = r.exit_code;
    j["result"] = r.result;
    json files = json::array();
    for (const auto& t : r.tables) {
        const std::string name = r.command + "_" + t.name + ".csv";
        write_file(cfg.out_dir / name, csv_text(t));
        files.push_back(name);
    }
    j["tables"] = files;
    write_file(cfg.out_dir / (r.command + ".json"), j.dump(2) + "\n");
}

void write_failure(const RunConfig& cfg, int exit_code, const std::string& message) {
    std::filesystem::create_directories(cfg.out_dir);
    json j = envelope(cfg);
    j["status"] = "error";
    j["exit_code"] = exit_code;
    j["message"] = message;
    write_file(cfg.out_dir / (cfg.command + ".json"), j.dump(2) + "\n");
}

int exit_code_for(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return 3;
    switch (err->kind()) {
        case ErrorKind::Input:
        case ErrorKind::Domain:
        case ErrorKind::Precondition:
            return 2;
        case ErrorKind::Schedule:
        case ErrorKind::Region:
            return 4;
        case ErrorKind::Convergence:
        case ErrorKind::Numerical:
        case ErrorKind::Frame:
            return 3;
    }
    return 3;
}

}  // namespace sfl::cli
