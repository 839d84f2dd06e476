#include "bdk/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace bdk::io {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::invalid_argument, "parameter file: " + what); }

json open_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::io, path + ": " + e.what());
    }
}

double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) fail(ErrorCode::io, where + ": not a number: '" + s + "'");
    return v;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ModelParams params_from_json(const json& j) {
    if (!j.is_object()) schema("expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "family" && key != "q" && key != "N" && key != "params") schema("unknown key '" + key + "'");
    }
    if (!j.contains("family") || !j["family"].is_string()) schema("'family' must be a string id");
    ModelParams p;
    p.family = family_from_id(j["family"].get<std::string>());
    if (j.contains("q") && !j["q"].is_null()) {
        if (!j["q"].is_number()) schema("'q' must be a number");
        p.q = j["q"].get<double>();
    }
    if (j.contains("N") && !j["N"].is_null()) {
        if (!j["N"].is_number_integer()) schema("'N' must be an integer");
        p.N = j["N"].get<int>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) schema("'params' must be an object");
        for (const auto& [name, v] : j["params"].items()) {
            if (!v.is_number()) schema("params." + name + " must be a number");
            p.values[name] = v.get<double>();
        }
    }
    return p;
}

json params_to_json(const ModelParams& p) {
    json j;
    j["family"] = std::string(family_info(p.family).id);
    if (p.q) j["q"] = *p.q;
    if (p.N) j["N"] = *p.N;
    j["params"] = json::object();
    for (const auto& [k, v] : p.values) j["params"][k] = v;
    return j;
}

ModelParams read_params_file(const std::string& path) { return params_from_json(open_json(path)); }

std::string defaults_path() {
    if (const char* env = std::getenv("BDK_DEFAULTS"); env && *env) return env;
    return BDK_DEFAULTS_FILE;
}

std::map<Family, ModelParams> load_defaults(const std::string& path) {
    const json j = open_json(path);
    if (!j.is_object() || !j.contains("families") || !j["families"].is_array()) {
        fail(ErrorCode::io, path + ": expected {\"version\": ..., \"families\": [...]}");
    }
    std::map<Family, ModelParams> out;
    for (const auto& entry : j["families"]) {
        ModelParams p = params_from_json(entry);
        if (out.count(p.family)) fail(ErrorCode::io, path + ": duplicate entry for " + std::string(family_info(p.family).id));
        out.emplace(p.family, std::move(p));
    }
    for (const auto& fi : families()) {
        if (!out.count(fi.family)) fail(ErrorCode::io, path + ": missing entry for " + std::string(fi.id));
    }
    return out;
}

ModelParams defaults_for(Family f) { return load_defaults(defaults_path()).at(f); }

void write_kernel_csv(std::ostream& os, const std::vector<KernelBlock>& blocks) {
    os << "y,x,t,probability\n";
    for (const auto& b : blocks) {
        const std::string t = format17(b.t);
        for (Eigen::Index y = 0; y < b.T.rows(); ++y) {
            for (Eigen::Index x = 0; x < b.T.cols(); ++x) os << y << ',' << x << ',' << t << ',' << format17(b.T(y, x)) << '\n';
        }
    }
}

json kernel_json(const KernelMeta& meta, const std::vector<KernelBlock>& blocks) {
    json j;
    j["family"] = std::string(family_info(meta.params.family).id);
    j["params"] = params_to_json(meta.params);
    j["orientation"] = "row = start state y, column = end state x";
    j["state_space"] = {{"kind", meta.space.finite() ? "finite" : "truncated"},
                        {"x_max", meta.space.x_max},
                        {"tail_mass_bound", meta.space.tail_mass_bound}};
    j["eps"] = {{"eps_tail", meta.options.eps_tail}, {"eps_spec", meta.options.eps_spec}, {"t_min", meta.options.t_min}};
    j["n_max"] = meta.n_max;
    j["spectral_tail_bound"] = meta.spectral_tail_bound;
    j["kernels"] = json::array();
    for (const auto& b : blocks) {
        json k;
        k["t"] = b.t;
        k["matrix"] = json::array();
        for (Eigen::Index y = 0; y < b.T.rows(); ++y) {
            json row = json::array();
            for (Eigen::Index x = 0; x < b.T.cols(); ++x) row.push_back(b.T(y, x));
            k["matrix"].push_back(std::move(row));
        }
        k["clamps"] = {{"count", b.diag.clamp_count}, {"max", b.diag.max_clamp}};
        k["max_row_deviation"] = b.diag.max_row_deviation;
        k["stationary_row_loss"] = b.diag.stationary_row_loss;
        j["kernels"].push_back(std::move(k));
    }
    return j;
}

void write_distribution_csv(std::ostream& os, const Distribution& d) {
    os << "x,probability\n";
    for (std::size_t x = 0; x < d.p.size(); ++x) os << x << ',' << format17(d.p[x]) << '\n';
}

Distribution read_distribution_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "x,probability") fail(ErrorCode::io, "distribution CSV: expected header 'x,probability'");
    Distribution d;
    std::set<long> seen;
    std::vector<std::pair<long, double>> entries;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string where = "distribution CSV line " + std::to_string(lineno);
        if (comma == std::string::npos) fail(ErrorCode::io, where + ": expected x,probability");
        const double xv = parse_double(line.substr(0, comma), where);
        if (xv < 0 || xv != std::floor(xv)) fail(ErrorCode::io, where + ": state must be a nonnegative integer");
        const long x = static_cast<long>(xv);
        if (!seen.insert(x).second) fail(ErrorCode::io, where + ": duplicate state " + std::to_string(x));
        entries.emplace_back(x, parse_double(line.substr(comma + 1), where));
    }
    if (entries.empty()) fail(ErrorCode::io, "distribution CSV: no rows");
    d.p.assign(static_cast<std::size_t>(*seen.rbegin()) + 1, 0.0);
    for (const auto& [x, v] : entries) d.p[static_cast<std::size_t>(x)] = v;
    return d;
}

Distribution read_distribution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    return read_distribution_csv(in);
}

json report_row(const CheckResult& r) {
    json j;
    j["check"] = r.check;
    j["family"] = r.family;
    j["params"] = r.params ? params_to_json(*r.params) : json(nullptr);
    j["metric"] = r.metric;
    j["value"] = nullable(r.value);
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json report_json(const std::vector<CheckResult>& rows) {
    json j;
    j["pass"] = all_pass(rows);
    j["checks"] = json::array();
    for (const auto& r : rows) j["checks"].push_back(report_row(r));
    return j;
}

}  // namespace bdk::io
