#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "mfglab/lq/mkv_solver.hpp"
#include "mfglab/lq/nash_solvers.hpp"
#include "mfglab/lq/residual.hpp"
#include "mfglab/ode.hpp"
#include "mfglab/rng.hpp"

using namespace mfglab;
using namespace mfglab::lq;

namespace {

LqSpec random_spec(std::uint64_t trial) {
    CounterRng rng(StreamKey{424242, rng_purpose::kProbe, trial});
    auto u = [&](std::uint64_t slot, double lo, double hi) {
        return lo + (hi - lo) * rng.uniform(slot, 0, 0);
    };
    LqSpec s;
    s.A = u(0, -0.8, 0.8);
    s.Abar = u(1, -0.8, 0.8);
    s.B = u(2, 0.5, 1.5);
    s.Bbar = u(3, -0.5, 0.5);
    s.Q = u(4, 0.0, 1.5);
    s.Qbar = u(5, 0.0, 1.0);
    s.R = u(6, 0.5, 2.0);
    s.Rbar = u(7, -0.2, 0.5);
    s.Sbar = u(8, -0.5, 0.5);
    s.QT = u(9, 0.0, 1.5);
    s.QbarT = u(10, 0.0, 1.0);
    s.sigma = 0.5;
    s.T = 1.0;
    s.mu0_mean = u(11, -1.0, 1.0);
    s.mu0_std = 0.4;
    return s;
}

double max_assembled_mismatch(const NPlayerDecoupling& a, const NPlayerDecoupling& b) {
    double worst = 0.0;
    const int N = a.N;
    for (int node : {0, a.grid.n_steps / 2, a.grid.n_steps}) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                for (int l = 0; l < N; ++l)
                    worst = std::max(worst, std::abs(a.y_coef(node, i, j, l) -
                                                     b.y_coef(node, i, j, l)));
                worst = std::max(worst, std::abs(a.y_offset(node, i, j) -
                                                 b.y_offset(node, i, j)));
            }
    }
    return worst;
}

}  // namespace

TEST_CASE("terminal condition of both encodings matches the adjoint terminal map") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 25);
    const int N = 5;
    const auto sym = solve_nplayer_lq_symmetric(s, N, grid);
    const auto dense = solve_nplayer_lq_dense(s, N, grid);
    const int last = grid.n_steps;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l) {
                const double expect = (i == j && l == i ? 2.0 * s.QT : 0.0) +
                                      2.0 * s.QbarT / (static_cast<double>(N) * N);
                REQUIRE(sym.y_coef(last, i, j, l) == Catch::Approx(expect).margin(1e-14));
                REQUIRE(dense.y_coef(last, i, j, l) == Catch::Approx(expect).margin(1e-14));
            }
}

TEST_CASE("no interaction: off-diagonal families vanish and (a, c) = (eta, psi)") {
    LqSpec s = default_spec();
    s.Abar = s.Bbar = s.Qbar = s.Rbar = s.Sbar = s.QbarT = 0.0;
    TimeGrid grid(s.T, 50);
    const auto sym = solve_nplayer_lq_symmetric(s, 6, grid);
    const auto mkv = solve_mkv_lq(s, grid);
    for (int k = 0; k <= grid.n_steps; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        REQUIRE(sym.sym.d[ku] == 0.0);
        REQUIRE(sym.sym.e[ku] == 0.0);
        REQUIRE(sym.sym.f[ku] == 0.0);
        REQUIRE(sym.sym.g[ku] == 0.0);
        REQUIRE(sym.sym.b[ku] == 0.0);
        REQUIRE(sym.sym.a[ku] == Catch::Approx(mkv.eta[ku]).margin(1e-9));
        REQUIRE(sym.sym.c[ku] == Catch::Approx(mkv.psi[ku]).margin(1e-9));
    }
}

TEST_CASE("N = 1 dense solve equals the merged single-agent Riccati") {
    // With one player the empirical means collapse onto the player: the
    // optimality condition becomes 0 = 2(R+Rbar) a + Sbar x + (B+Bbar) y and
    // the scalar Riccati below is assembled directly from the merged
    // coefficients as an independent oracle.
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 60);
    const auto dense = solve_nplayer_lq_dense(s, 1, grid);

    const double Am = s.A + s.Abar, Bm = s.B + s.Bbar, Qm = s.Q + s.Qbar,
                 Rm = s.R + s.Rbar, QTm = s.QT + s.QbarT;
    auto rhs = [&](double, double eta) {
        const double dalpha = -(s.Sbar + Bm * eta) / (2.0 * Rm);
        return -(eta * (Am + Bm * dalpha)) - (2.0 * Qm + s.Sbar * dalpha + Am * eta);
    };
    auto guard = [](double) {};
    const auto eta = integrate_backward_refined(rhs, grid, 2.0 * QTm, guard,
                                                [](double v) { return v; });
    for (int k = 0; k <= grid.n_steps; k += 6) {
        CAPTURE(k);
        REQUIRE(dense.y_coef(k, 0, 0, 0) ==
                Catch::Approx(eta[static_cast<std::size_t>(k)]).margin(1e-8));
    }
}

TEST_CASE("dense and symmetric solvers agree to 1e-8 on random specs") {
    // the cross-solver oracle: same system, two independent derivations
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
        const LqSpec s = random_spec(trial);
        TimeGrid grid(s.T, 40);
        const int N = 8;
        const auto sym = solve_nplayer_lq_symmetric(s, N, grid);
        const auto dense = solve_nplayer_lq_dense(s, N, grid);
        CAPTURE(trial);
        REQUIRE(max_assembled_mismatch(sym, dense) < 1e-8);
    }
}

TEST_CASE("dense limit and pre-conditions are enforced") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 10);
    NPlayerSolveOptions opt;
    opt.dense_limit = 8;
    CHECK_THROWS_AS(solve_nplayer_lq_dense(s, 9, grid, opt), DenseLimitExceeded);
    LqSpec bad = s;
    bad.R = 0.1;
    bad.Rbar = -0.4;  // R + Rbar/N = 0 at N = 4
    CHECK_THROWS_AS(solve_nplayer_lq_dense(bad, 4, grid), ConfigError);
    CHECK_THROWS_AS(solve_nplayer_lq_symmetric(s, 1, grid), ConfigError);
}

TEST_CASE("solved dense map is exchangeable (permutation equivariance)") {
    // Relabeling players permutes P blockwise. The solved tensor's
    // exchangeability is exact up to float summation order; 1e-12 here.
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 30);
    const int N = 4;
    const auto dense = solve_nplayer_lq_dense(s, N, grid);
    double worst = 0.0;
    // swap players 0 and 1
    auto pi = [](int idx) { return idx == 0 ? 1 : idx == 1 ? 0 : idx; };
    for (int node : {0, grid.n_steps / 2}) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int l = 0; l < N; ++l)
                    worst = std::max(worst,
                                     std::abs(dense.y_coef(node, i, j, l) -
                                              dense.y_coef(node, pi(i), pi(j), pi(l))));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("off-diagonal families stay bounded in N and assembled entries shrink like 1/N") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 40);
    double prev_max_offdiag = -1.0;
    for (int N : {8, 16, 32, 64, 128, 256, 512}) {
        const auto sym = solve_nplayer_lq_symmetric(s, N, grid);
        double fam = 0.0, assembled = 0.0;
        for (int k = 0; k <= grid.n_steps; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            fam = std::max({fam, std::abs(sym.sym.d[ku]), std::abs(sym.sym.e[ku]),
                            std::abs(sym.sym.f[ku]), std::abs(sym.sym.g[ku])});
            // largest coefficient of the assembled Y^{1,2} map
            for (int l = 0; l < std::min(N, 3); ++l)
                assembled = std::max(assembled, std::abs(sym.y_coef(k, 0, 1, l)));
        }
        CAPTURE(N);
        REQUIRE(fam < 50.0);  // bounded uniformly in N; the assertable invariant
        if (N >= 32) {
            // doubling N halves the assembled maximum within 10%; the 8 -> 16
            // doubling still carries a visible 1/N correction inside the
            // coefficient itself and is covered by the boundedness assertion
            const double ratio = assembled / prev_max_offdiag;
            REQUIRE(ratio > 0.45);
            REQUIRE(ratio < 0.55);
        }
        prev_max_offdiag = assembled;
    }
}

TEST_CASE("residual of the solved N-player decoupling passes on a fine grid") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 1500);
    const auto sym = solve_nplayer_lq_symmetric(s, 6, grid);
    CHECK(nplayer_decoupling_residual(sym, 60) <= 1e-6);
}
