#include <catch2/catch_amalgamated.hpp>

#include "mfglab/metrics/rates.hpp"

using mfglab::ConfigError;
using mfglab::UndefinedRegime;
using mfglab::metrics::RateQuery;
using mfglab::metrics::theoretical_rate;

namespace {
double rate(long N, double M, double k, double p) {
    return theoretical_rate(RateQuery{N, M, k, p});
}
}  // namespace

TEST_CASE("rate table reproduces hand-verified values in all three regimes") {
    // Values computed independently (40-digit arithmetic) and frozen here.
    struct Case {
        long N;
        double M, k, p, expect;
    };
    const Case cases[] = {
        // p > M/2, k != 2p
        {100, 1, 6, 2, 0.14641588833612779},
        {1, 1, 6, 2, 2.0},
        {8, 1, 8, 2, 0.56377749440670244},
        {512, 3, 8, 2, 0.05348485441011798},
        {10000, 2, 3, 2, 0.05641588833612779},
        // p = M/2, k != 2p
        {100, 4, 6, 2, 0.50792794002025377},
        {4096, 4, 8, 2, 0.13192203558666987},
        {50, 2, 5, 1, 0.59977859642622289},
        {7, 6, 7, 3, 1.1148724155888319},
        // M > 2p, k != M/(M-p)
        {10000, 6, 8, 2, 0.047415888336127789},
        {256, 5, 3, 2, 0.26630895164887464},
        {81, 10, 9, 4, 0.50228598397598045},
    };
    for (const auto& c : cases) {
        CAPTURE(c.N, c.M, c.k, c.p);
        CHECK(rate(c.N, c.M, c.k, c.p) == Catch::Approx(c.expect).epsilon(0.0).margin(1e-12));
    }
}

TEST_CASE("N = 1 gives 2 where both terms are plain powers") {
    CHECK(rate(1, 1, 6, 2) == Catch::Approx(2.0).margin(1e-15));  // regime 1
    CHECK(rate(1, 6, 8, 2) == Catch::Approx(2.0).margin(1e-15));  // regime 3
}

TEST_CASE("excluded boundary cases raise UndefinedRegime") {
    CHECK_THROWS_AS(rate(4, 4, 4, 2), UndefinedRegime);            // p = M/2, k = 2p
    CHECK_THROWS_AS(rate(16, 1, 4, 2), UndefinedRegime);           // p > M/2, k = 2p
    CHECK_THROWS_AS(rate(100, 2, 4, 2), UndefinedRegime);          // p = M/2, k = 2p
    CHECK_THROWS_AS(rate(9, 6, 1.2, 1), UndefinedRegime);          // M > 2p, k = M/(M-p)
    CHECK_THROWS_AS(rate(1000, 8, 8.0 / 7.0, 1), UndefinedRegime); // M > 2p, k = M/(M-p)
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(rate(0, 1, 6, 2), ConfigError);
    CHECK_THROWS_AS(rate(10, 0.5, 6, 2), ConfigError);
    CHECK_THROWS_AS(rate(10, 8, 2, 4), ConfigError);  // k <= p
    CHECK_THROWS_AS(rate(10, 1, 2, 2), ConfigError);  // k = p
}

TEST_CASE("default power is p = 2") {
    CHECK(mfglab::metrics::theoretical_rate(100, 1, 6) ==
          Catch::Approx(rate(100, 1, 6, 2)).epsilon(0.0).margin(0.0));
}
