// Acceptance run: one PASS/FAIL line per criterion AC1..AC10.
//
//   acceptance [--known-failure ACk]...
//
// Exit status is 0 iff the set of failing criteria equals the set named with
// --known-failure. A known failure that starts passing is reported and also
// exits nonzero, so the list cannot go stale.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bdk/oracle.hpp"
#include "bdk/spectral.hpp"
#include "bdk/verify.hpp"

using namespace bdk;

namespace {

// Pinned budgets.
constexpr double kOracleTol = 1e-10;          // AC1, AC2
constexpr double kFiniteSeconds = 5;          // AC1
constexpr double kInfiniteSeconds = 30;       // AC2
constexpr double kSimulationSeconds = 60;     // AC8
constexpr double kEps = 1e-12;                // eps_tail = eps_spec = kEps / 2
constexpr std::size_t kPaths = 100000;        // AC8
constexpr std::uint64_t kSeed = 20240611;     // AC8
constexpr double kSampleTime = 1.0;           // AC8

struct Line {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string id_of(Family f) { return std::string(family_info(f).id); }

std::vector<Family> select(bool finite) {
    std::vector<Family> out;
    for (const auto& fi : families()) {
        if (fi.finite == finite) out.push_back(fi.family);
    }
    return out;
}

Line oracle_equivalence(bool finite, double limit) {
    Line line;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> times = finite ? std::vector<double>{0.1, 1, 10} : std::vector<double>{0.1, 1};
    const SpectralOptions so = SpectralOptions::from_budget(kEps);
    double worst = 0;
    for (Family f : select(finite)) {
        try {
            const Model m = Model::validate(default_params(f));
            const SpectralData data = SpectralData::build(m, so);
            const OracleKernels orc = oracle_kernels(m, data.space(), times);
            double dev = 0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                dev = std::max(dev, (transition_matrix(data, times[i]) - orc.kernels[i]).cwiseAbs().maxCoeff());
            }
            worst = std::max(worst, dev);
            if (!(dev <= kOracleTol)) line.failures.push_back(id_of(f) + " deviation " + sci(dev));
        } catch (const Error& e) {
            line.failures.push_back(id_of(f) + " " + std::string(to_string(e.code())) + ": " + e.what());
        }
    }
    const double secs = seconds_since(t0);
    line.pass = line.failures.empty() && secs < limit;
    line.detail = "max deviation " + sci(worst) + " over passing families (tol " + sci(kOracleTol) + "), " + sci(secs) +
                  " s (limit " + sci(limit) + " s)";
    return line;
}

/// Rows produced by the verification suite, keyed by family.
using Suite = std::map<Family, std::vector<CheckResult>>;

Line from_rows(const Suite& suite, const std::set<std::string>& checks, bool finite_only) {
    Line line;
    std::map<std::string, double> worst;
    for (const auto& [f, rows] : suite) {
        if (finite_only && !family_info(f).finite) continue;
        for (const auto& r : rows) {
            if (!checks.count(r.check)) continue;
            if (!worst.count(r.check) || r.value > worst[r.check] || std::isnan(r.value)) worst[r.check] = r.value;
            if (!r.pass) line.failures.push_back(r.family + " " + r.check + " " + sci(r.value) + (r.note.empty() ? "" : " [" + r.note + "]"));
        }
    }
    for (const auto& c : checks) {
        if (!worst.count(c)) line.failures.push_back("no rows for " + c);
    }
    line.pass = line.failures.empty();
    for (const auto& [c, v] : worst) line.detail += (line.detail.empty() ? "" : ", ") + c + " max " + sci(v);
    return line;
}

Line simulation() {
    Line line;
    const auto t0 = std::chrono::steady_clock::now();
    const SpectralOptions so = SpectralOptions::from_budget(kEps);
    for (Family f : {Family::krawtchouk, Family::charlier, Family::q_hahn}) {
        try {
            const Model m = Model::validate(default_params(f));
            const SpectralData data = SpectralData::build(m, so);
            const SampleResult s = gillespie_sample(m, data.space(), 0, kSampleTime, kPaths, kSeed);
            std::vector<double> row(data.space().size());
            for (int x = 0; x <= data.x_max(); ++x) row[static_cast<std::size_t>(x)] = transition_probability(data, 0, x, kSampleTime);
            const double tv = total_variation(s.empirical.p, row);
            const double band = sampling_band(row, kPaths);
            line.detail += (line.detail.empty() ? "" : ", ") + id_of(f) + " TV " + sci(tv) + "/" + sci(band);
            if (!(tv <= band)) line.failures.push_back(id_of(f) + " TV " + sci(tv) + " above band " + sci(band));
        } catch (const Error& e) {
            line.failures.push_back(id_of(f) + " " + std::string(to_string(e.code())) + ": " + e.what());
        }
    }
    const double secs = seconds_since(t0);
    line.pass = line.failures.empty() && secs < kSimulationSeconds;
    line.detail += ", " + sci(secs) + " s (limit " + sci(kSimulationSeconds) + " s)";
    return line;
}

Line closed_forms() {
    Line line;
    double worst = 0;
    for (const auto& r : verify_closed_form_kernels()) {
        worst = std::max(worst, r.value);
        if (!r.pass) line.failures.push_back(r.family + " " + r.note + ": " + sci(r.value));
    }
    line.pass = line.failures.empty();
    line.detail = "max |series - closed form| " + sci(worst) + " (tol " + sci(tolerance::closed_form) + ")";
    return line;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<std::string> known;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--known-failure" && i + 1 < argc) {
            known.insert(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--known-failure ACk]...\n");
            return 2;
        }
    }

    Suite suite;
    VerifyOptions vo;
    vo.eps = kEps;
    for (const auto& fi : families()) suite[fi.family] = verify_family(default_params(fi.family), vo);

    struct Criterion {
        std::string id;
        std::string title;
        std::function<Line()> run;
    };
    const std::vector<Criterion> criteria{
        {"AC1", "oracle equivalence, 10 finite families, t in {0.1,1,10}", [] { return oracle_equivalence(true, kFiniteSeconds); }},
        {"AC2", "oracle equivalence, 8 infinite families, t in {0.1,1}", [] { return oracle_equivalence(false, kInfiniteSeconds); }},
        {"AC3", "orthogonality, n,m <= min(N,25)", [&] { return from_rows(suite, {"orthogonality"}, false); }},
        {"AC4", "duality and self-duality", [&] { return from_rows(suite, {"duality", "self-duality"}, false); }},
        {"AC5", "eigensystem of H",
         [&] { return from_rows(suite, {"spectrum", "a-phi0", "positive-semidefinite", "eigen-residual"}, false); }},
        {"AC6", "stationary laws", [&] { return from_rows(suite, {"stationary-law", "stationary-normalizer"}, false); }},
        {"AC7", "semigroup and detailed balance, finite families",
         [&] { return from_rows(suite, {"semigroup", "detailed-balance"}, true); }},
        {"AC8", "Gillespie vs spectral row, 1e5 paths", [] { return simulation(); }},
        {"AC9", "Hermite and Laguerre closed-form kernels", [] { return closed_forms(); }},
        {"AC10", "spectral-gap decay rate, finite families", [&] { return from_rows(suite, {"spectral-gap"}, true); }},
    };

    std::set<std::string> failed;
    for (const auto& c : criteria) {
        const Line line = c.run();
        if (!line.pass) failed.insert(c.id);
        const char* tag = line.pass ? "PASS" : (known.count(c.id) ? "FAIL (known)" : "FAIL");
        std::printf("%s %s: %s; %s\n", c.id.c_str(), tag, c.title.c_str(), line.detail.c_str());
        for (const auto& f : line.failures) std::printf("    %s\n", f.c_str());
        std::fflush(stdout);
    }
    int status = 0;
    for (const auto& id : known) {
        if (!failed.count(id)) {
            std::printf("%s was listed as a known failure but passed\n", id.c_str());
            status = 1;
        }
    }
    for (const auto& id : failed) {
        if (!known.count(id)) status = 1;
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed.size(), criteria.size());
    return status;
}
