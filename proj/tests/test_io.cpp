#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdk/io.hpp"

using namespace bdk;
using io::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "bdk_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

bool same(const ModelParams& a, const ModelParams& b) {
    return a.family == b.family && a.q == b.q && a.N == b.N && a.values == b.values;
}

}  // namespace

TEST_CASE("parameter JSON round trip") {
    for (const auto& fi : families()) {
        const ModelParams p = default_params(fi.family);
        CHECK(same(io::params_from_json(json::parse(io::params_to_json(p).dump())), p));
    }
    const ModelParams p = io::params_from_json(json::parse(R"({"family": "q-hahn-ks3.6", "q": 0.5, "N": 4, "params": {"a": 0.25, "b": 0.5}})"));
    CHECK(p.family == Family::q_hahn);
    CHECK(*p.N == 4);
    CHECK(p.values.at("a") == 0.25);
}

TEST_CASE("parameter JSON schema errors") {
    auto code = [](const char* text) {
        try {
            io::params_from_json(json::parse(text));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::io;
    };
    CHECK(code(R"({"family": "hahn"})") == ErrorCode::invalid_argument);
    CHECK(code(R"({"family": "hahn-ks1.5", "N": 4.5})") == ErrorCode::invalid_argument);
    CHECK(code(R"({"family": "hahn-ks1.5", "params": {"a": "x"}})") == ErrorCode::invalid_argument);
    CHECK(code(R"({"family": "hahn-ks1.5", "extra": 1})") == ErrorCode::invalid_argument);
    CHECK(code(R"([1, 2])") == ErrorCode::invalid_argument);
    CHECK_THROWS_AS(io::read_params_file("/nonexistent/model.json"), Error);
}

TEST_CASE("shipped defaults equal the built-in defaults; BDK_DEFAULTS overrides the path") {
    const auto d = io::load_defaults(BDK_DEFAULTS_FILE);
    CHECK(d.size() == 18);
    for (const auto& [f, p] : d) CHECK(same(p, default_params(f)));

    json j = json::parse(std::ifstream(BDK_DEFAULTS_FILE));
    for (auto& e : j["families"]) {
        if (e["family"] == "charlier-ks1.12") e["params"]["a"] = 3.5;
    }
    const auto path = scratch("defaults.json");
    std::ofstream(path) << j.dump();
    setenv("BDK_DEFAULTS", path.c_str(), 1);
    CHECK(io::defaults_path() == path.string());
    CHECK(io::defaults_for(Family::charlier).values.at("a") == 3.5);
    unsetenv("BDK_DEFAULTS");
    CHECK(io::defaults_path() == BDK_DEFAULTS_FILE);

    j["families"].erase(0);
    std::ofstream(path) << j.dump();
    CHECK_THROWS_AS(io::load_defaults(path.string()), Error);
}

TEST_CASE("distribution CSV round-trips bit for bit") {
    const SpectralData d = SpectralData::build(Model::validate(default_params(Family::charlier)));
    Distribution start;
    start.p.assign(d.space().size(), 0.0);
    start.p[1] = 1;
    const Distribution out = evolve(d, start, 0.37);
    std::stringstream ss;
    io::write_distribution_csv(ss, out);
    const Distribution back = io::read_distribution_csv(ss);
    CHECK(back.p == out.p);
    CHECK(evolve(d, back, 0.0).p == out.p);

    CHECK(io::format17(0.1) == "0.10000000000000001");
    CHECK(std::stod(io::format17(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("distribution CSV errors") {
    auto read = [](const std::string& text) {
        std::stringstream ss(text);
        return io::read_distribution_csv(ss);
    };
    CHECK_THROWS_AS(read("state,p\n0,1\n"), Error);
    CHECK_THROWS_AS(read("x,probability\n0,abc\n"), Error);
    CHECK_THROWS_AS(read("x,probability\n0,0.5\n0,0.5\n"), Error);
    CHECK_THROWS_AS(read("x,probability\n1.5,1\n"), Error);
    CHECK(read("x,probability\n2,1\n").p == std::vector<double>{0, 0, 1});
}

TEST_CASE("kernel CSV and JSON") {
    const Model m = Model::validate(default_params(Family::hahn));
    const SpectralData d = SpectralData::build(m);
    io::KernelBlock b;
    b.t = 0.5;
    b.T = transition_matrix(d, 0.5, KernelForm::polynomial, &b.diag);
    std::stringstream ss;
    io::write_kernel_csv(ss, {b});
    std::string line;
    std::getline(ss, line);
    CHECK(line == "y,x,t,probability");
    int rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == 81);

    const json j = io::kernel_json({m.params(), d.space(), d.options(), d.n_max(), d.spectral_tail_bound()}, {b});
    CHECK(j["family"] == "hahn-ks1.5");
    CHECK(j["kernels"][0]["matrix"].size() == 9);
    CHECK(j["kernels"][0]["matrix"][2][3].get<double>() == b.T(2, 3));
    CHECK(j["kernels"][0]["clamps"]["count"] == 0);
    CHECK(j.contains("eps"));
}

TEST_CASE("verification report rows") {
    const auto rows = verify_family(default_params(Family::krawtchouk));
    CHECK(all_pass(rows));
    const json j = io::report_json(rows);
    CHECK(j["pass"] == true);
    for (const auto& r : j["checks"]) {
        for (const char* k : {"check", "family", "params", "metric", "value", "threshold", "pass"}) CHECK(r.contains(k));
    }

    // q-Charlier: the spectral checks fail with the reason attached, the rest still run
    const auto qc = verify_family(default_params(Family::q_charlier));
    CHECK_FALSE(all_pass(qc));
    bool saw_orthogonality = false;
    for (const auto& r : qc) {
        if (r.check == "orthogonality") saw_orthogonality = r.pass;
        if (r.check == "oracle-equivalence") {
            CHECK(std::isnan(r.value));
            CHECK(r.note.find("not complete") != std::string::npos);
            CHECK(io::report_row(r)["value"].is_null());
        }
    }
    CHECK(saw_orthogonality);

    ModelParams bad = default_params(Family::hahn);
    bad.values["a"] = -1;
    const auto v = verify_family(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].check == "validation");
    CHECK_FALSE(v[0].pass);
}

TEST_CASE("fitted decay rate recovers an exponential") {
    std::vector<double> t, d;
    for (int i = 0; i < 10; ++i) {
        t.push_back(0.5 * i);
        d.push_back(3 * std::exp(-1.7 * 0.5 * i));
    }
    CHECK(fitted_decay_rate(t, d) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(fitted_decay_rate({1}, {1}), Error);
}
