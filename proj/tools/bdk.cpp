// bdk: command-line front end. Errors exit 1 (validation), 2 (numerical
// budget) or 3 (internal consistency); a failed verification exits 3.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bdk/io.hpp"
#include "bdk/oracle.hpp"
#include "bdk/spectral.hpp"
#include "bdk/verify.hpp"

using namespace bdk;
using io::format17;
using io::json;

namespace {

struct Config {
    std::string model_file;
    std::string family;
    std::vector<std::string> param_kv;
    std::optional<double> q;
    std::optional<int> N;
    std::string times = "1";
    double eps_tail = 5e-13;
    double eps_spec = 5e-13;
    double t_min = 0.1;
    std::uint64_t seed = 20240611;
    std::size_t paths = 100000;
    std::string format = "csv";
    std::string out;
    bool verify = false;
    bool all = false;
    std::string initial;
    int y0 = 0;
};

ModelParams model_params(const Config& c) {
    const bool inline_source = !c.family.empty();
    if (inline_source == !c.model_file.empty()) fail(ErrorCode::invalid_argument, "give exactly one of --model <file> or --family <id>");
    if (!inline_source && (!c.param_kv.empty() || c.q || c.N)) {
        fail(ErrorCode::invalid_argument, "--param/--q/--N only apply with --family");
    }
    if (!inline_source) return io::read_params_file(c.model_file);
    ModelParams p = io::defaults_for(family_from_id(c.family));
    if (c.q) p.q = c.q;
    if (c.N) p.N = c.N;
    for (const auto& kv : c.param_kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) fail(ErrorCode::invalid_argument, "--param expects name=value, got '" + kv + "'");
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(kv.substr(eq + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != kv.size() - eq - 1) fail(ErrorCode::invalid_argument, "--param " + kv + ": value is not a number");
        p.values[kv.substr(0, eq)] = v;
    }
    return p;
}

std::vector<double> time_grid(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double t = -1;
        try {
            t = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !(t >= 0) || !std::isfinite(t)) {
            fail(ErrorCode::invalid_argument, "--t: '" + item + "' is not a finite time >= 0");
        }
        out.push_back(t);
    }
    if (out.empty()) fail(ErrorCode::invalid_argument, "--t: need at least one time");
    return out;
}

SpectralOptions spectral_options(const Config& c) {
    for (double e : {c.eps_tail, c.eps_spec}) {
        if (!(e > 0 && e <= 0.1)) fail(ErrorCode::invalid_argument, "epsilon budgets must lie in (0, 0.1]");
    }
    if (!(c.t_min > 0) || !std::isfinite(c.t_min)) fail(ErrorCode::invalid_argument, "--t-min must be positive");
    SpectralOptions o;
    o.eps_tail = c.eps_tail;
    o.eps_spec = c.eps_spec;
    o.t_min = c.t_min;
    return o;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) fail(ErrorCode::io, "cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void check_format(const Config& c) {
    if (c.format != "csv" && c.format != "json") fail(ErrorCode::invalid_argument, "--format must be csv or json");
}

int cmd_list(const Config& c) {
    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        json rows = json::array();
        for (const auto& fi : families()) {
            json names = json::array();
            for (auto n : fi.params) names.push_back(std::string(n));
            rows.push_back({{"id", std::string(fi.id)}, {"name", std::string(fi.name)}, {"ks", std::string(fi.ks)},
                            {"finite", fi.finite}, {"q_family", fi.q_family}, {"self_dual", fi.self_dual},
                            {"params", names}, {"constraints", std::string(fi.constraints)}});
        }
        os << rows.dump(2) << '\n';
        return 0;
    }
    os << "id,ks,space,self_dual,params,constraints\n";
    for (const auto& fi : families()) {
        std::string names;
        for (auto n : fi.params) names += (names.empty() ? "" : " ") + std::string(n);
        if (fi.q_family) names = "q " + names;
        if (fi.finite) names = "N " + names;
        os << fi.id << ',' << fi.ks << ',' << (fi.finite ? "finite" : "infinite") << ',' << (fi.self_dual ? "yes" : "no")
           << ',' << names << ",\"" << fi.constraints << "\"\n";
    }
    return 0;
}

int cmd_rates(const Config& c) {
    check_format(c);
    const Model m = Model::validate(model_params(c));
    const StateSpace space = m.state_space(spectral_options(c).eps_tail);
    const double d0 = m.norm_const_sq(0);
    Output out(c.out);
    std::ostream& os = out.stream();
    double mass = 0;
    json rows = json::array();
    if (c.format == "csv") os << "x,B,D,eta,phi0_sq,stationary\n";
    for (int x = 0; x <= space.x_max; ++x) {
        const double phi = m.ground_state_sq(x);
        const double st = d0 * phi;
        mass += st;
        if (c.format == "csv") {
            os << x << ',' << format17(m.birth_rate(x)) << ',' << format17(m.death_rate(x)) << ',' << format17(m.sinusoidal(x))
               << ',' << format17(phi) << ',' << format17(st) << '\n';
        } else {
            rows.push_back({{"x", x}, {"B", m.birth_rate(x)}, {"D", m.death_rate(x)}, {"eta", m.sinusoidal(x)},
                            {"phi0_sq", phi}, {"stationary", st}});
        }
    }
    if (c.format == "json") {
        os << json{{"params", io::params_to_json(m.params())}, {"x_max", space.x_max},
                   {"tail_mass_bound", space.tail_mass_bound}, {"rows", rows}}
                  .dump(2)
           << '\n';
    }
    std::cerr << "stationary mass on 0.." << space.x_max << ": " << format17(mass) << '\n';
    const double allowed = (space.finite() ? 0 : space.tail_mass_bound) + 1e-12;
    if (std::fabs(mass - 1) > allowed) {
        fail(ErrorCode::internal_consistency, "stationary column sums to " + format17(mass) + ", outside the tail budget");
    }
    return 0;
}

int cmd_kernel(const Config& c) {
    check_format(c);
    const Model m = Model::validate(model_params(c));
    const std::vector<double> times = time_grid(c.times);
    const SpectralData data = SpectralData::build(m, spectral_options(c));
    std::vector<io::KernelBlock> blocks;
    for (double t : times) {
        io::KernelBlock b;
        b.t = t;
        b.T = transition_matrix(data, t, KernelForm::polynomial, &b.diag);
        blocks.push_back(std::move(b));
    }
    Output out(c.out);
    if (c.format == "csv") {
        io::write_kernel_csv(out.stream(), blocks);
    } else {
        io::KernelMeta meta{m.params(), data.space(), data.options(), data.n_max(), data.spectral_tail_bound()};
        out.stream() << io::kernel_json(meta, blocks).dump(2) << '\n';
    }

    int status = 0;
    std::cerr << "n_max " << data.n_max() << ", x_max " << data.x_max() << ", spectral tail bound "
              << data.spectral_tail_bound() << '\n';
    for (const auto& b : blocks) {
        std::cerr << "t=" << b.t << ": max row deviation " << b.diag.max_row_deviation << ", stationary row loss "
                  << b.diag.stationary_row_loss << ", clamps " << b.diag.clamp_count << " (max " << b.diag.max_clamp << ")\n";
        const bool ok = m.finite() ? b.diag.max_row_deviation <= tolerance::conservation
                                   : b.diag.stationary_row_loss <= data.space().tail_mass_bound + tolerance::conservation;
        if (!ok) status = exit_code(ErrorCode::internal_consistency);
    }
    if (status) std::cerr << "row sums outside the budget\n";
    if (c.verify) {
        const OracleKernels orc = oracle_kernels(m, data.space(), times);
        double worst = 0;
        for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, (blocks[i].T - orc.kernels[i]).cwiseAbs().maxCoeff());
        std::cerr << "oracle: max |T - exp(tL)| = " << worst << " (tolerance " << tolerance::oracle << ", lattice 0.."
                  << orc.lattice_last << (m.finite() ? "" : ", reflecting") << ")\n";
        if (!(worst <= tolerance::oracle)) status = exit_code(ErrorCode::internal_consistency);
    }
    return status;
}

int cmd_evolve(const Config& c) {
    check_format(c);
    const Model m = Model::validate(model_params(c));
    const std::vector<double> times = time_grid(c.times);
    const SpectralData data = SpectralData::build(m, spectral_options(c));
    Distribution initial;
    if (!c.initial.empty()) {
        initial = io::read_distribution_file(c.initial);
    } else {
        if (c.y0 < 0 || c.y0 > data.x_max()) fail(ErrorCode::out_of_range, "--y0 outside 0.." + std::to_string(data.x_max()));
        initial.p.assign(data.space().size(), 0.0);
        initial.p[static_cast<std::size_t>(c.y0)] = 1;
    }
    if (initial.p.size() != data.space().size()) {
        fail(ErrorCode::invalid_argument, "initial distribution covers 0.." + std::to_string(initial.p.size() - 1) +
                                              " but the state space is 0.." + std::to_string(data.x_max()));
    }
    const Distribution pi = stationary_distribution(data);
    std::vector<Distribution> results;
    std::vector<double> ts, ds;
    for (double t : times) {
        results.push_back(evolve(data, initial, t));
        double d = 0;
        for (std::size_t x = 0; x < pi.p.size(); ++x) d += std::fabs(results.back().p[x] - pi.p[x]);
        std::cerr << "t=" << t << ": L1 distance to stationary " << d << '\n';
        if (t > 0 && d > 0) {
            ts.push_back(t);
            ds.push_back(d);
        }
    }
    if (ts.size() >= 2) {
        const double rate = fitted_decay_rate(ts, ds);
        std::cerr << "fitted decay rate " << rate << ", E(1) = " << m.energy(1) << '\n';
    }

    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        json j{{"params", io::params_to_json(m.params())}, {"distributions", json::array()}};
        for (const auto& d : results) j["distributions"].push_back({{"t", d.t}, {"p", d.p}});
        os << j.dump(2) << '\n';
    } else if (results.size() == 1) {
        io::write_distribution_csv(os, results.front());
    } else {
        os << "t,x,probability\n";
        for (const auto& d : results) {
            for (std::size_t x = 0; x < d.p.size(); ++x) os << format17(d.t) << ',' << x << ',' << format17(d.p[x]) << '\n';
        }
    }
    return 0;
}

int cmd_sample(const Config& c) {
    check_format(c);
    const Model m = Model::validate(model_params(c));
    const std::vector<double> times = time_grid(c.times);
    if (times.size() != 1) fail(ErrorCode::invalid_argument, "sample takes a single --t");
    const SpectralData data = SpectralData::build(m, spectral_options(c));
    const double t = times.front();
    const SampleResult s = gillespie_sample(m, data.space(), c.y0, t, c.paths, c.seed);
    std::vector<double> spectral(data.space().size());
    for (int x = 0; x <= data.x_max(); ++x) spectral[static_cast<std::size_t>(x)] = transition_probability(data, c.y0, x, t);
    const double tv = total_variation(s.empirical.p, spectral);
    const double band = sampling_band(spectral, c.paths);

    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        os << json{{"params", io::params_to_json(m.params())}, {"y0", c.y0}, {"t", t}, {"paths", c.paths},
                   {"seed", c.seed}, {"generator", s.generator}, {"escape_attempts", s.escape_attempts},
                   {"empirical", s.empirical.p}, {"spectral", spectral}, {"total_variation", tv}, {"band", band}}
                  .dump(2)
           << '\n';
    } else {
        os << "x,count,empirical,spectral\n";
        for (std::size_t x = 0; x < spectral.size(); ++x) {
            os << x << ',' << s.counts[x] << ',' << format17(s.empirical.p[x]) << ',' << format17(spectral[x]) << '\n';
        }
    }
    std::cerr << "generator " << s.generator << ", seed " << s.seed << ", " << s.n_paths << " paths, escape attempts "
              << s.escape_attempts << "\ntotal variation " << tv << " (band " << band << ")\n";
    return 0;
}

int cmd_verify(const Config& c) {
    std::vector<CheckResult> rows;
    if (c.all) {
        if (!c.family.empty() || !c.model_file.empty()) fail(ErrorCode::invalid_argument, "--all takes no model");
        const auto defaults = io::load_defaults(io::defaults_path());
        for (const auto& [f, p] : defaults) {
            auto r = verify_family(p);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        auto k = verify_closed_form_kernels();
        rows.insert(rows.end(), k.begin(), k.end());
    } else {
        rows = verify_family(model_params(c));
    }
    Output out(c.out);
    std::ostream& os = out.stream();
    if (c.format == "json") {
        os << io::report_json(rows).dump(2) << '\n';
    } else {
        for (const auto& r : rows) {
            os << (r.pass ? "PASS " : "FAIL ") << r.family << ' ' << r.check << ": " << r.metric << " = " << r.value
               << " (threshold " << r.threshold << ")";
            if (!r.note.empty()) os << " [" << r.note << "]";
            os << '\n';
        }
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    std::cerr << rows.size() - failed << "/" << rows.size() << " checks passed\n";
    return failed ? exit_code(ErrorCode::internal_consistency) : 0;
}

void model_flags(CLI::App* sub, Config& c) {
    sub->add_option("--model", c.model_file, "model parameter JSON file");
    sub->add_option("--family", c.family, "family id (see `bdk list`); starts from its defaults");
    sub->add_option("--param", c.param_kv, "override a parameter, name=value")->allow_extra_args(false);
    sub->add_option("--q", c.q, "base q");
    sub->add_option("--N", c.N, "lattice size");
    sub->add_option("--eps-tail", c.eps_tail, "stationary mass allowed beyond x_max");
    sub->add_option("--eps-spec", c.eps_spec, "kernel mass allowed beyond n_max");
    sub->add_option("--t-min", c.t_min, "smallest positive time the cutoff must cover");
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "csv or json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exactly solvable birth-death processes"};
    app.require_subcommand(1);
    Config c;

    auto* list = app.add_subcommand("list", "list the 18 families");
    list->add_option("--format", c.format, "csv or json");
    list->add_option("--out", c.out, "output file");
    auto* rates = app.add_subcommand("rates", "tabulate B, D, eta, phi0^2 and the stationary law");
    model_flags(rates, c);
    auto* kernel = app.add_subcommand("kernel", "transition matrices T(t), rows = start state");
    model_flags(kernel, c);
    kernel->add_option("--t", c.times, "comma-separated times");
    kernel->add_flag("--verify", c.verify, "compare against exp(tL) from the generator");
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a distribution");
    model_flags(evolve_cmd, c);
    evolve_cmd->add_option("--t", c.times, "comma-separated times");
    evolve_cmd->add_option("--initial", c.initial, "initial distribution CSV (x,probability)");
    evolve_cmd->add_option("--y0", c.y0, "start state when no --initial is given");
    auto* sample = app.add_subcommand("sample", "Gillespie sampling against the spectral row");
    model_flags(sample, c);
    sample->add_option("--t", c.times, "time");
    sample->add_option("--y0", c.y0, "start state");
    sample->add_option("--seed", c.seed, "PRNG seed");
    sample->add_option("--paths", c.paths, "number of paths");
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    model_flags(verify, c);
    verify->add_flag("--all", c.all, "every family at its default parameters, plus the closed-form kernels");
    bool as_json = false;
    verify->add_flag("--json", as_json, "JSON report");
    c.format = "csv";

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorCode::invalid_argument);
    }
    if (as_json) c.format = "json";

    try {
        if (*list) return cmd_list(c);
        if (*rates) return cmd_rates(c);
        if (*kernel) return cmd_kernel(c);
        if (*evolve_cmd) return cmd_evolve(c);
        if (*sample) return cmd_sample(c);
        if (*verify) return cmd_verify(c);
    } catch (const Error& e) {
        std::cerr << "bdk: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    }
    return 0;
}
