#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "mfglab/lq/io.hpp"
#include "mfglab/lq/mkv_solver.hpp"
#include "mfglab/lq/residual.hpp"
#include "mfglab/lq/spec.hpp"

using namespace mfglab;
using namespace mfglab::lq;

TEST_CASE("separable Riccati closed form: eta(t) = 1/(1 + T - t)") {
    // A = Q = Qbar = Sbar = Abar = Bbar = Rbar = 0, B = 1, R = 1/2, QT = 1/2:
    // eta' = eta^2 with eta(T) = 1, checked by substitution.
    LqSpec s;
    s.B = 1.0;
    s.R = 0.5;
    s.QT = 0.5;
    s.sigma = 1.0;
    s.T = 1.0;
    s.mu0_mean = 0.7;
    s.mu0_std = 0.4;
    TimeGrid grid(s.T, 64);
    const auto dec = solve_mkv_lq(s, grid);
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.node(k);
        CAPTURE(k, t);
        REQUIRE(dec.eta[static_cast<std::size_t>(k)] ==
                Catch::Approx(1.0 / (1.0 + s.T - t)).margin(1e-10));
        REQUIRE(dec.psi[static_cast<std::size_t>(k)] == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("terminal conditions hold for any spec") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 50);
    const auto dec = solve_mkv_lq(s, grid);
    const auto last = static_cast<std::size_t>(grid.n_steps);
    CHECK(dec.eta[last] == 2.0 * s.QT);
    CHECK(dec.psi[last] == 0.0);
    CHECK(dec.n[last] == Catch::Approx(2.0 * s.QT * dec.m[last]).margin(1e-12));
}

TEST_CASE("zero state cost gives the zero decoupling and zero control") {
    LqSpec s = default_spec();
    s.Q = 0.0;
    s.QT = 0.0;
    s.Sbar = 0.0;  // Sbar feeds E[Y] back into the driver; with Y = 0 it is inert anyway
    TimeGrid grid(s.T, 40);
    const auto dec = solve_mkv_lq(s, grid);
    for (int k = 0; k <= grid.n_steps; ++k) {
        REQUIRE(dec.eta[static_cast<std::size_t>(k)] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(dec.psi[static_cast<std::size_t>(k)] == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(dec.alpha_of_x(k, 1.23) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("means are consistent with the affine ansatz: n = eta m + psi") {
    for (const bool coop : {false, true}) {
        const LqSpec s = default_spec();
        TimeGrid grid(s.T, 64);
        const auto dec = coop ? solve_cooperative_lq(s, grid) : solve_mkv_lq(s, grid);
        for (int k = 0; k <= grid.n_steps; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            CAPTURE(coop, k);
            REQUIRE(dec.n[ku] ==
                    Catch::Approx(dec.eta[ku] * dec.m[ku] + dec.psi[ku]).margin(1e-9));
        }
    }
}

TEST_CASE("FBSDE residual of the solved decoupling is below tolerance") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 2000);
    const auto dec = solve_mkv_lq(s, grid);
    LqResidualOptions opt;
    opt.paths = 1000;
    CHECK(mfg_decoupling_residual(dec, opt) <= 1e-6);
    const auto coop = solve_cooperative_lq(s, grid);
    CHECK(mfg_decoupling_residual(coop, opt) <= 1e-6);
}

TEST_CASE("Riccati blowup is detected") {
    // eta' = -2 eta^2 - 2Q drives eta to -infinity when B^2/(2R) < 0
    LqSpec s;
    s.B = 1.0;
    s.R = -0.05;
    s.Q = 1.0;
    s.QT = 1.0;
    s.sigma = 1.0;
    s.T = 20.0;
    TimeGrid grid(s.T, 200);
    CHECK_THROWS_AS(solve_mkv_lq(s, grid), RiccatiBlowup);
}

TEST_CASE("cooperative solution equals the Nash limit without interaction") {
    LqSpec s = default_spec();
    s.Abar = s.Bbar = s.Qbar = s.Rbar = s.Sbar = s.QbarT = 0.0;
    TimeGrid grid(s.T, 64);
    const auto mfg = solve_mkv_lq(s, grid);
    const auto coop = solve_cooperative_lq(s, grid);
    for (int k = 0; k <= grid.n_steps; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        REQUIRE(coop.eta[ku] == Catch::Approx(mfg.eta[ku]).margin(1e-12));
        REQUIRE(coop.psi[ku] == Catch::Approx(mfg.psi[ku]).margin(1e-12));
        REQUIRE(coop.m[ku] == Catch::Approx(mfg.m[ku]).margin(1e-10));
        REQUIRE(coop.n[ku] == Catch::Approx(mfg.n[ku]).margin(1e-10));
    }
}

TEST_CASE("cooperative channels match a discrete-time dynamic-programming oracle") {
    // Rbar = Sbar = Bbar = 0, Qbar != 0: the problem splits into a
    // fluctuation channel (costs Q, R, QT) and a mean channel with effective
    // state cost Q + Qbar and terminal QT + QbarT. Both channels are solved
    // here by a brute-force backward recursion with exact per-step
    // minimization over the control.
    LqSpec s = default_spec();
    s.Rbar = s.Sbar = s.Bbar = 0.0;
    REQUIRE(s.Qbar != 0.0);
    const int n = 4096;
    TimeGrid grid(s.T, 256);
    const auto dec = solve_cooperative_lq(s, grid);

    auto dp_riccati = [&](double a_coef, double b_coef, double q_cost, double r_cost,
                          double p_terminal) {
        // value V_k(x) = p_k x^2; exact one-step minimization of
        //   q x^2 dt + r u^2 dt + p_{k+1} (x + (a x + b u) dt)^2
        std::vector<double> p(static_cast<std::size_t>(n) + 1);
        p[static_cast<std::size_t>(n)] = p_terminal;
        const double dt = s.T / n;
        for (int k = n - 1; k >= 0; --k) {
            const double pn = p[static_cast<std::size_t>(k) + 1];
            const double m11 = pn * (1.0 + a_coef * dt) * (1.0 + a_coef * dt) + q_cost * dt;
            const double m12 = pn * (1.0 + a_coef * dt) * b_coef * dt;
            const double m22 = pn * b_coef * b_coef * dt * dt + r_cost * dt;
            p[static_cast<std::size_t>(k)] = m11 - m12 * m12 / m22;
        }
        return p;
    };

    const auto p_fluct = dp_riccati(s.A, s.B, s.Q, s.R, s.QT);
    const auto p_mean = dp_riccati(s.A + s.Abar, s.B, s.Q + s.Qbar, s.R, s.QT + s.QbarT);

    const int ratio = n / grid.n_steps;
    for (int k = 0; k <= grid.n_steps; k += 16) {
        const auto ku = static_cast<std::size_t>(k);
        const auto dpk = static_cast<std::size_t>(k * ratio);
        // fluctuation channel: eta/2 is the value coefficient
        REQUIRE(dec.eta[ku] / 2.0 == Catch::Approx(p_fluct[dpk]).epsilon(2e-3).margin(2e-3));
        // mean channel: the adjoint mean satisfies n = 2 p_mean m
        REQUIRE(dec.n[ku] ==
                Catch::Approx(2.0 * p_mean[dpk] * dec.m[ku]).epsilon(3e-3).margin(3e-3));
    }
}

TEST_CASE("decoupling serializes to the tabular format and parses back") {
    const LqSpec s = default_spec();
    TimeGrid grid(s.T, 10);
    const auto dec = solve_mkv_lq(s, grid);
    const Table t = to_table(dec);
    std::stringstream ss(t.to_string());
    const Table back = Table::parse(ss);
    CHECK(back.meta_value("kind") == "mfg");
    CHECK(back.rows().size() == 11);
    CHECK(back.column("eta [adjoint/state]").back() == 2.0 * s.QT);
}
