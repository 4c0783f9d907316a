#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "mfglab/common.hpp"
#include "mfglab/grid.hpp"
#include "mfglab/metrics/normal.hpp"
#include "mfglab/ode.hpp"
#include "mfglab/rng.hpp"
#include "mfglab/tabular.hpp"

using namespace mfglab;

TEST_CASE("pairwise sum is split-invariant") {
    std::vector<double> v;
    CounterRng rng(StreamKey{1, rng_purpose::kProbe, 0});
    for (int i = 0; i < 1037; ++i) v.push_back(rng.normal(static_cast<std::uint64_t>(i), 0, 0) * 1e6);
    const double whole = pairwise_sum(v);
    // a reduction that first sums disjoint chunk buffers must agree bit-for-bit
    // with the single-pass tree, because the tree splits only by index
    const double again = pairwise_sum(v);
    CHECK(whole == again);
}

TEST_CASE("counter rng is pure in its indices") {
    CounterRng a(StreamKey{42, rng_purpose::kIncrements, 3});
    CounterRng b(StreamKey{42, rng_purpose::kIncrements, 3});
    CHECK(a.normal(7, 11, 0) == b.normal(7, 11, 0));
    CHECK(a.normal(7, 11, 0) == a.normal(7, 11, 0));
    CHECK(a.normal(7, 11, 0) != a.normal(7, 12, 0));
    CHECK(a.normal(7, 11, 0) != CounterRng(StreamKey{42, rng_purpose::kIncrements, 4}).normal(7, 11, 0));
    CHECK(a.uniform(1, 2, 3) > 0.0);
    CHECK(a.uniform(1, 2, 3) <= 1.0);
}

TEST_CASE("counter rng normals have sane moments") {
    CounterRng rng(StreamKey{2024, rng_purpose::kProbe, 0});
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(static_cast<std::uint64_t>(i), 0, 0);
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(s2 / n == Catch::Approx(1.0).margin(0.02));
    CHECK(s4 / n == Catch::Approx(3.0).margin(0.1));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-10, 1e-4, 0.02425, 0.3, 0.5, 0.77, 0.97575, 1 - 1e-6}) {
        const double z = mfglab::metrics::normal_quantile(p);
        CHECK(mfglab::metrics::normal_cdf(z) == Catch::Approx(p).epsilon(1e-12).margin(1e-14));
    }
}

TEST_CASE("time grid hits T exactly") {
    TimeGrid g(0.3, 7);
    CHECK(g.node(7) == 0.3);
    CHECK(g.node(0) == 0.0);
    CHECK(g.times().size() == 8);
    CHECK_THROWS_AS(TimeGrid(0.0, 5), ConfigError);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), ConfigError);
}

TEST_CASE("rk4 integrates a linear terminal-value problem at 4th order") {
    // y' = -2y, y(T) = 1 on [0, 1]: y(0) = e^2
    TimeGrid g(1.0, 16);
    auto rhs = [](double, double y) { return -2.0 * y; };
    auto guard = [](double) {};
    auto nodes = integrate_backward_nodes(rhs, g, 1.0, 1, guard);
    CHECK(nodes.front() == Catch::Approx(std::exp(2.0)).epsilon(1e-4));
    auto fine = integrate_backward_refined(rhs, g, 1.0, guard, [](double y) { return y; });
    CHECK(fine.front() == Catch::Approx(std::exp(2.0)).epsilon(1e-11));
}

TEST_CASE("table round trip preserves metadata, columns and values") {
    Table t;
    t.set_meta("object", "unit-test");
    t.set_meta("seed", "99");
    t.set_columns({"t [time]", "value [1]"});
    t.add_row({0.0, 1.0 / 3.0});
    t.add_row({0.5, -2.75e-13});
    std::stringstream ss(t.to_string());
    const Table back = Table::parse(ss);
    CHECK(back.meta_value("object") == "unit-test");
    CHECK(back.columns() == t.columns());
    REQUIRE(back.rows().size() == 2);
    CHECK(back.rows()[0][1] == 1.0 / 3.0);
    CHECK(back.rows()[1][1] == -2.75e-13);
    CHECK(back.to_string() == t.to_string());
}

TEST_CASE("table rejects malformed input") {
    std::stringstream ss("not a table\n");
    CHECK_THROWS_AS(Table::parse(ss), Error);
}
