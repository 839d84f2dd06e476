#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run bdk(const std::string& args) {
    const std::string cmd = std::string(BDK_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int w = pclose(p);
    r.status = WIFEXITED(w) ? WEXITSTATUS(w) : -1;
    return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "bdk_test_cli";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("list: 18 families, 3 self-dual") {
    const Run r = bdk("list");
    CHECK(r.status == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 19);
    int self_dual = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) self_dual += rows[i][3] == "yes";
    CHECK(self_dual == 3);
    CHECK(r.out.find("q-racah-ks3.2,KS3.2") != std::string::npos);
    CHECK(nlohmann::json::parse(bdk("list --format json").out).size() == 18);
}

TEST_CASE("rates: binomial and Poisson columns, D(0) = 0") {
    const Run k = bdk("rates --family krawtchouk-ks1.10 --N 4");
    CHECK(k.status == 0);
    const auto rows = csv(k.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][5] == "stationary");
    const double expect[] = {1, 4, 6, 4, 1};
    for (int x = 0; x <= 4; ++x) CHECK(std::stod(rows[x + 1][5]) == doctest::Approx(expect[x] / 16).epsilon(1e-15));
    CHECK(std::stod(rows[1][2]) == 0.0);

    const auto c = csv(bdk("rates --family charlier-ks1.12").out);
    double mass = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        const int x = static_cast<int>(i - 1);
        mass += std::stod(c[i][5]);
        CHECK(std::stod(c[i][5]) == doctest::Approx(std::exp(x * std::log(2.0) - 2 - std::lgamma(x + 1.0))).epsilon(1e-12));
    }
    CHECK(std::fabs(mass - 1) <= 5e-13);
}

TEST_CASE("kernel: identity at t = 0, oracle cross-check, JSON metadata") {
    const auto rows = csv(bdk("kernel --family hahn-ks1.5 --t 0").out);
    REQUIRE(rows.size() == 82);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) == (rows[i][0] == rows[i][1] ? 1.0 : 0.0));
    CHECK(bdk("kernel --family q-racah-ks3.2 --t 0.1,1,10 --verify").status == 0);
    CHECK(bdk("kernel --family little-q-jacobi-ks3.12 --t 0.5 --verify").status == 0);
    const auto j = nlohmann::json::parse(bdk("kernel --family charlier-ks1.12 --t 1 --format json").out);
    CHECK(j["n_max"].get<int>() > 0);
    CHECK(j["state_space"]["kind"] == "truncated");
    CHECK(j["kernels"][0]["clamps"].contains("count"));
}

TEST_CASE("evolve: CSV round trip is bit-exact, stationary in gives stationary out") {
    const std::string a = scratch("a.csv"), b = scratch("b.csv");
    REQUIRE(bdk("evolve --family q-hahn-ks3.6 --y0 2 --t 0.7 --out " + a).status == 0);
    REQUIRE(bdk("evolve --family q-hahn-ks3.6 --initial " + a + " --t 0 --out " + b).status == 0);
    std::ifstream fa(a), fb(b);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    CHECK(sa.rfind("x,probability\n", 0) == 0);

    const auto rates = csv(bdk("rates --family krawtchouk-ks1.10").out);
    const std::string pi = scratch("pi.csv");
    {
        std::ofstream o(pi);
        o << "x,probability\n";
        for (std::size_t i = 1; i < rates.size(); ++i) o << i - 1 << ',' << rates[i][5] << '\n';
    }
    const auto out = csv(bdk("evolve --family krawtchouk-ks1.10 --initial " + pi + " --t 3").out);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(std::stod(out[i][1]) == doctest::Approx(std::stod(rates[i][5])).epsilon(1e-12));

    CHECK(bdk("evolve --family krawtchouk-ks1.10 --N 4 --initial " + a + " --t 1").status == 1);  // support mismatch
}

TEST_CASE("sample: deterministic given the seed, point mass at t = 0") {
    const Run a = bdk("sample --family krawtchouk-ks1.10 --t 10 --paths 20000 --seed 5");
    const Run b = bdk("sample --family krawtchouk-ks1.10 --t 10 --paths 20000 --seed 5");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    const auto z = csv(bdk("sample --family charlier-ks1.12 --t 0 --y0 3 --paths 100").out);
    CHECK(z[4][1] == "100");
    const auto j = nlohmann::json::parse(bdk("sample --family krawtchouk-ks1.10 --t 10 --format json").out);
    CHECK(j["total_variation"].get<double>() <= 0.01);
    CHECK(j["seed"] == 20240611);
}

TEST_CASE("verify: single family, JSON schema, exit status") {
    const Run r = bdk("verify --family krawtchouk-ks1.10 --json");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    for (const auto& row : j["checks"]) CHECK(row["family"] == "krawtchouk-ks1.10");
    CHECK(bdk("verify --family q-charlier-ks3.23").status == 3);
}

TEST_CASE("exit codes") {
    CHECK(bdk("rates --family hahn-ks1.5 --param a=-1").status == 1);
    CHECK(bdk("rates --family hahn-ks1.5 --param a").status == 1);
    CHECK(bdk("rates").status == 1);
    CHECK(bdk("rates --family no-such-family").status == 1);
    CHECK(bdk("kernel --family hahn-ks1.5 --t -1").status == 1);
    CHECK(bdk("kernel --family hahn-ks1.5 --eps-tail 0.5").status == 1);
    CHECK(bdk("kernel --family charlier-ks1.12 --t 0.01").status == 2);
    CHECK(bdk("kernel --family q-meixner-ks3.13").status == 3);
    CHECK(bdk("frobnicate").status == 1);

    const std::string model = scratch("model.json");
    std::ofstream(model) << R"({"family": "dual-hahn-ks1.6", "N": 3, "params": {"a": 2, "b": 0.5}})";
    CHECK(bdk("rates --model " + model).status == 0);
    CHECK(bdk("rates --model " + model + " --family hahn-ks1.5").status == 1);
    CHECK(bdk("rates --model /nonexistent.json").status == 1);
}
