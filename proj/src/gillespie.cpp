#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bdk/oracle.hpp"

namespace bdk {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SampleResult gillespie_sample(const Model& model, const StateSpace& space, int y0, double t, std::size_t n_paths,
                              std::uint64_t seed) {
    if (n_paths == 0) fail(ErrorCode::invalid_argument, "gillespie_sample: n_paths must be at least 1");
    if (!(t >= 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "gillespie_sample: t must be finite and nonnegative");
    const int X = space.x_max;
    if (y0 < 0 || y0 > X) fail(ErrorCode::out_of_range, "gillespie_sample: start state outside 0.." + std::to_string(X));

    std::vector<double> B(space.size()), D(space.size());
    for (int x = 0; x <= X; ++x) {
        B[static_cast<std::size_t>(x)] = model.birth_rate(x);
        D[static_cast<std::size_t>(x)] = model.death_rate(x);
    }

    SampleResult out;
    out.seed = seed;
    out.n_paths = n_paths;
    out.y0 = y0;
    out.counts.assign(space.size(), 0);
    for (std::size_t path = 0; path < n_paths; ++path) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(path)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int x = y0;
        double clock = 0;
        for (;;) {
            const double b = B[static_cast<std::size_t>(x)];
            const double total = b + D[static_cast<std::size_t>(x)];
            if (total <= 0) break;
            clock += std::exponential_distribution<double>(total)(rng);
            if (clock > t) break;
            if (unit(rng) * total < b) {
                // a birth out of a truncated space is refused; the path stays put
                if (x == X) ++out.escape_attempts;
                else ++x;
            } else {
                --x;
            }
        }
        ++out.counts[static_cast<std::size_t>(x)];
    }
    out.empirical.t = t;
    out.empirical.p.resize(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) {
        out.empirical.p[x] = static_cast<double>(out.counts[x]) / static_cast<double>(n_paths);
    }
    return out;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) fail(ErrorCode::invalid_argument, "total_variation: size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return s / 2;
}

double sampling_band(const std::vector<double>& p, std::size_t n_paths) {
    double worst = 0;
    for (double v : p) worst = std::max(worst, std::sqrt(std::clamp(v, 0.0, 1.0) * (1 - std::clamp(v, 0.0, 1.0)) / static_cast<double>(n_paths)));
    return 4 * worst + 0.002;
}

}  // namespace bdk
