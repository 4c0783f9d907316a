#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "mfglab/metrics/normal.hpp"
#include "mfglab/metrics/stats.hpp"
#include "mfglab/metrics/wasserstein.hpp"
#include "mfglab/rng.hpp"

using namespace mfglab::metrics;
using mfglab::CounterRng;
using mfglab::StreamKey;

TEST_CASE("exact power-law points give slope -1") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {8.0, 16.0, 32.0, 64.0, 128.0}) pts.push_back({n, 1.0 / n});
    const auto fit = loglog_slope(pts);
    CHECK(fit.slope == Catch::Approx(-1.0).margin(1e-12));
    CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("slope fit needs at least 4 points and positive values") {
    CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 1}, {3, 1}}), mfglab::InsufficientData);
    CHECK_THROWS_AS(loglog_slope({{1, 1}, {2, 1}, {3, 1}, {4, 0.0}}), mfglab::InsufficientData);
}

TEST_CASE("all samples below the threshold: estimate 0, upper bound about 3/n") {
    std::vector<double> s(200, 0.5);
    const auto t = empirical_tail(s, 1.0);
    CHECK(t.estimate == 0.0);
    CHECK(t.lower == 0.0);
    CHECK(t.upper > 1.0 / 200.0);
    CHECK(t.upper < 5.0 / 200.0);  // Wilson gives about 3.84/n at k = 0
}

TEST_CASE("empirical tails match Gaussian tail probabilities within 2 interval widths") {
    CounterRng rng(StreamKey{5150, mfglab::rng_purpose::kProbe, 0});
    const int n = 20000;
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = rng.normal(static_cast<std::uint64_t>(i), 0, 0);
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        const auto t = empirical_tail(s, a);
        const double truth = 1.0 - normal_cdf(a);  // error-function oracle
        const double width = t.upper - t.lower;
        CAPTURE(a, t.estimate, truth, width);
        CHECK(std::abs(t.estimate - truth) <= 2.0 * width);
    }
}

TEST_CASE("empty tail sample rejected") {
    CHECK_THROWS_AS(empirical_tail({}, 1.0), mfglab::EmptySample);
}

TEST_CASE("iid Gaussian empirical W2^2 decays with slope in [-1.1, -0.8]") {
    // Supports the moment-rate sanity law the experiments rely on.
    CounterRng rng(StreamKey{31337, mfglab::rng_purpose::kReferenceSample, 0});
    std::vector<std::pair<double, double>> pts;
    const GaussianLaw g{0.0, 1.0};
    int stream = 0;
    for (int n : {32, 64, 128, 256, 512, 1024, 2048, 4096}) {
        const int reps = 30000 / n + 20;
        double acc = 0.0;
        for (int r = 0; r < reps; ++r) {
            std::vector<double> sample(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                sample[static_cast<std::size_t>(i)] =
                    rng.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(stream + r), 0);
            const double w = wasserstein2_1d(sample, g);
            acc += w * w;
        }
        stream += reps;
        pts.push_back({static_cast<double>(n), acc / reps});
    }
    const auto fit = loglog_slope(pts);
    CAPTURE(fit.slope, fit.r_squared);
    CHECK(fit.slope >= -1.1);
    CHECK(fit.slope <= -0.8);
}
