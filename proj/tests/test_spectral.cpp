#include <doctest.h>

#include <cmath>

#include "bdk/spectral.hpp"

using namespace bdk;

namespace {

SpectralData build(Family f, double eps = 1e-12) {
    return SpectralData::build(Model::validate(default_params(f)), SpectralOptions::from_budget(eps));
}

bool complete(Family f) { return f != Family::q_charlier && f != Family::q_meixner; }

}  // namespace

TEST_CASE("joint budget splits evenly") {
    const SpectralOptions o = SpectralOptions::from_budget(1e-12, 0.5);
    CHECK(o.eps_tail == 5e-13);
    CHECK(o.eps_spec == 5e-13);
    CHECK(o.t_min == 0.5);
}

TEST_CASE("Krawtchouk N=1 kernel in closed form") {
    ModelParams p = default_params(Family::krawtchouk);
    p.N = 1;
    p.values["p"] = 0.25;
    const SpectralData d = SpectralData::build(Model::validate(p));
    // B(0) = p N, D(1) = (1-p): two-state chain with rate sum 1
    for (double t : {0.0, 0.3, 2.0}) {
        const Matrix T = transition_matrix(d, t);
        const double e = std::exp(-t);
        CHECK(T(0, 1) == doctest::Approx(0.25 * (1 - e)).epsilon(1e-14));
        CHECK(T(1, 0) == doctest::Approx(0.75 * (1 - e)).epsilon(1e-14));
        CHECK(T(0, 0) + T(0, 1) == doctest::Approx(1.0));
    }
}

TEST_CASE("t = 0 gives the identity, rows are start states") {
    for (const auto& fi : families()) {
        if (!complete(fi.family)) continue;
        CAPTURE(fi.id);
        const SpectralData d = build(fi.family);
        const Matrix T = transition_matrix(d, 0.0);
        CHECK((T - Matrix::Identity(T.rows(), T.cols())).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const SpectralData d = build(Family::hahn);
    // from y=0 the chain can only have moved up
    CHECK(transition_probability(d, 0, 1, 0.01) > 1e-4);
    CHECK(transition_probability(d, 0, 8, 0.01) < 1e-9);  // eight jumps: O(t^8)
}

TEST_CASE("four kernel forms agree") {
    for (const auto& fi : families()) {
        if (!complete(fi.family)) continue;
        CAPTURE(fi.id);
        const SpectralData d = build(fi.family);
        for (double t : {0.1, 1.0}) {
            const Matrix P = transition_matrix(d, t, KernelForm::polynomial);
            for (KernelForm f : {KernelForm::normalized, KernelForm::dual, KernelForm::f_form}) {
                CHECK((transition_matrix(d, t, f) - P).cwiseAbs().maxCoeff() <= 1e-10);
            }
        }
    }
}

TEST_CASE("finite kernels are stochastic, satisfy detailed balance and Chapman-Kolmogorov") {
    for (const auto& fi : families()) {
        if (!fi.finite) continue;
        CAPTURE(fi.id);
        const SpectralData d = build(fi.family);
        Diagnostics diag;
        const Matrix T = transition_matrix(d, 0.7, KernelForm::polynomial, &diag);
        CHECK(diag.max_row_deviation <= 1e-12);
        CHECK(T.minCoeff() >= 0);
        const Distribution pi = stationary_distribution(d);
        for (int y = 0; y <= d.x_max(); ++y) {
            for (int x = 0; x <= d.x_max(); ++x) CHECK(std::fabs(pi.p[y] * T(y, x) - pi.p[x] * T(x, y)) <= 1e-13);
        }
        const Matrix ck = transition_matrix(d, 0.3) * transition_matrix(d, 0.4) - T;
        CHECK(ck.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("infinite kernels lose at most the tail mass under the stationary law") {
    for (const auto& fi : families()) {
        if (fi.finite || !complete(fi.family)) continue;
        CAPTURE(fi.id);
        const SpectralData d = build(fi.family);
        Diagnostics diag;
        transition_matrix(d, 1.0, KernelForm::polynomial, &diag);
        CHECK(diag.stationary_row_loss <= d.space().tail_mass_bound + 1e-12);
        CHECK(d.completeness_deficit() <= 1e-12);
    }
}

TEST_CASE("incomplete eigenvectors are reported, not silently summed") {
    for (Family f : {Family::q_charlier, Family::q_meixner}) {
        try {
            build(f);
            FAIL("build succeeded");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::internal_consistency);
            CHECK(std::string(e.what()).find("not complete") != std::string::npos);
        }
    }
}

TEST_CASE("stationary distribution is invariant and is the long-time limit") {
    for (Family f : {Family::krawtchouk, Family::dual_q_hahn, Family::charlier, Family::little_q_jacobi}) {
        const SpectralData d = build(f);
        const Distribution pi = stationary_distribution(d);
        double s = 0;
        for (double v : pi.p) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        const Distribution out = evolve(d, pi, 2.0);
        for (std::size_t x = 0; x < pi.p.size(); ++x) CHECK(out.p[x] == doctest::Approx(pi.p[x]).epsilon(1e-9));
        const Matrix T = transition_matrix(d, 60.0 / d.model().energy(1));
        for (int x = 0; x <= d.x_max(); ++x) CHECK(std::fabs(T(0, x) - pi.p[x]) <= 1e-12);
    }
}

TEST_CASE("evolve: delta in gives the kernel row, t = 0 is bit-exact") {
    const SpectralData d = build(Family::q_hahn);
    Distribution delta;
    delta.p.assign(d.space().size(), 0.0);
    delta.p[3] = 1;
    const Distribution out = evolve(d, delta, 0.8);
    const Matrix T = transition_matrix(d, 0.8);
    for (int x = 0; x <= d.x_max(); ++x) CHECK(out.p[x] == doctest::Approx(T(3, x)).epsilon(1e-13));
    const Distribution same = evolve(d, out, 0.0);
    CHECK(same.p == out.p);

    Distribution bad = delta;
    bad.p.pop_back();
    CHECK_THROWS_AS(evolve(d, bad, 1.0), Error);
    bad = delta;
    bad.p[0] = -0.5;
    bad.p[3] = 1.5;
    CHECK_THROWS_AS(evolve(d, bad, 1.0), Error);
}

TEST_CASE("cutoff grows as t_min shrinks and is exact for finite families") {
    const Model c = Model::validate(default_params(Family::charlier));
    const StateSpace s = c.state_space(5e-13);
    const CutoffResult a = spectral_cutoff(c, s, 1.0, 5e-13);
    const CutoffResult b = spectral_cutoff(c, s, 0.1, 5e-13);
    CHECK(a.n_max <= b.n_max);
    CHECK(b.tail_bound <= 5e-13);
    const Model k = Model::validate(default_params(Family::krawtchouk));
    const CutoffResult f = spectral_cutoff(k, k.state_space(1e-12), 0.1, 1e-12);
    CHECK(f.n_max == 8);
    CHECK(f.tail_bound == 0.0);
}

TEST_CASE("argument checks") {
    const SpectralData d = build(Family::hahn);
    CHECK_THROWS_AS(transition_matrix(d, -1.0), Error);
    CHECK_THROWS_AS(transition_probability(d, 9, 0, 1.0), Error);
    CHECK_THROWS_AS(transition_matrix(d, std::nan("")), Error);
    SpectralOptions bad;
    bad.eps_tail = 0;
    CHECK_THROWS_AS(SpectralData::build(Model::validate(default_params(Family::hahn)), bad), Error);
}
