#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/lq/control_map.hpp"
#include "mfglab/lq/mkv_solver.hpp"
#include "mfglab/lq/nplayer_decoupling.hpp"
#include "mfglab/rng.hpp"

namespace mfglab::lq {

/// One-step backward residual of a solved decoupling along simulated forward
/// paths: max over nodes of E|Y_{k+1} - Y_k + driver dt - Z dW|^2 relative to
/// E|Y_k|^2 dt^2. Z is taken as the state gradient of the affine map at the
/// right node, the martingale-consistent choice for the Euler forward step;
/// the residual then measures the drift consistency of the decoupling and is
/// O(dt^4) per step for an exact field.
struct LqResidualOptions {
    int paths = 2000;
    std::uint64_t seed = 20240301;
};

inline double mfg_decoupling_residual(const MfgDecoupling& dec,
                                      const LqResidualOptions& opt = {}) {
    const auto& grid = dec.grid;
    const auto& s = dec.spec;
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const int M = opt.paths;

    CounterRng inc(StreamKey{opt.seed, rng_purpose::kIncrements, 0});
    CounterRng init(StreamKey{opt.seed, rng_purpose::kInitialDraws, 0});
    Eigen::VectorXd x(M);
    for (int i = 0; i < M; ++i)
        x(i) = s.mu0_mean + s.mu0_std * init.normal(static_cast<std::uint64_t>(i), 0, 0);

    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        double acc = 0.0, scale = 0.0;
        Eigen::VectorXd xnext(M);
        for (int i = 0; i < M; ++i) {
            const double dw = sqdt * inc.normal(static_cast<std::uint64_t>(i),
                                                static_cast<std::uint64_t>(k), 0);
            const double yk = dec.y_of(k, x(i));
            const double drift = dec.drift_of_x(k, x(i));
            const double xn = x(i) + drift * dt + s.sigma * dw;
            const double ynext = dec.y_of(k + 1, xn);
            const double z_right = dec.z_of(k + 1);
            const double r = ynext - yk + dec.driver_of(k, x(i), yk) * dt - z_right * dw;
            acc += r * r;
            scale += yk * yk;
            xnext(i) = xn;
        }
        x.swap(xnext);
        const double rel = (acc / M) / std::max(scale / M, 1e-12) / (dt * dt);
        worst = std::max(worst, rel);
    }
    return worst;
}

/// Same check for an N-player decoupling: simulate the N-particle stack under
/// the equilibrium drift and test every adjoint entry.
inline double nplayer_decoupling_residual(const NPlayerDecoupling& dec, int replications = 200,
                                          std::uint64_t seed = 20240302) {
    const auto& grid = dec.grid;
    const auto& s = dec.spec;
    const int n = grid.n_steps;
    const int N = dec.N;
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const EquilibriumControlMap cmap{s};

    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<double> scale(static_cast<std::size_t>(n), 0.0);

    for (int rep = 0; rep < replications; ++rep) {
        CounterRng inc(StreamKey{seed, rng_purpose::kIncrements, static_cast<std::uint64_t>(rep)});
        CounterRng init(StreamKey{seed, rng_purpose::kInitialDraws, static_cast<std::uint64_t>(rep)});
        Eigen::VectorXd x(N);
        for (int i = 0; i < N; ++i)
            x(i) = s.mu0_mean + s.mu0_std * init.normal(static_cast<std::uint64_t>(i), 0, 0);

        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd dw(N);
            for (int i = 0; i < N; ++i)
                dw(i) = sqdt * inc.normal(static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(k), 0);

            // equilibrium controls and drift at node k
            const double xbar = x.mean();
            Eigen::VectorXd y_diag(N), row_mean(N);
            Eigen::MatrixXd yk(N, N);
            for (int i = 0; i < N; ++i) {
                double rm = 0.0;
                for (int j = 0; j < N; ++j) {
                    yk(i, j) = dec.y_entry(k, i, j, x);
                    rm += yk(i, j);
                }
                y_diag(i) = yk(i, i);
                row_mean(i) = rm / N;
            }
            const double diag_mean = y_diag.mean();
            const double grand_mean = yk.mean();

            Eigen::VectorXd alpha(N);
            double alpha_bar = 0.0;
            for (int i = 0; i < N; ++i) {
                AdjointStats st{y_diag(i), row_mean(i), diag_mean, grand_mean};
                alpha(i) = dec.kind == GameKind::nash
                               ? cmap.nash_alpha(N, x(i), xbar, st)
                               : cmap.coop_alpha(y_diag(i), xbar, diag_mean);
                alpha_bar += alpha(i);
            }
            alpha_bar /= N;

            Eigen::VectorXd xnext(N);
            for (int i = 0; i < N; ++i)
                xnext(i) = x(i) + (s.A * x(i) + s.Abar * xbar + s.B * alpha(i) +
                                   s.Bbar * alpha_bar) * dt + s.sigma * dw(i);

            // residual of every adjoint entry, with Z from the right node
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) {
                    if (dec.kind == GameKind::social && i != j) continue;
                    double driver;
                    if (dec.kind == GameKind::nash) {
                        driver = 2.0 * s.Qbar / N * xbar + s.A * yk(i, j) +
                                 s.Abar * row_mean(i);
                        if (i == j) driver += 2.0 * s.Q * x(i) + s.Sbar * alpha_bar;
                    } else {
                        const double rr = s.R + s.Rbar;
                        driver = 2.0 * s.Q * x(i) +
                                 (2.0 * s.Qbar - s.Sbar * s.Sbar / (2.0 * rr)) * xbar +
                                 s.A * yk(i, j) +
                                 (s.Abar - s.Sbar * (s.B + s.Bbar) / (2.0 * rr)) * diag_mean;
                    }
                    // Y^{ij} at k+1 on the stepped state, minus the linear part on dW
                    double ynext = dec.y_offset(k + 1, i, j);
                    double zdw = 0.0;
                    for (int l = 0; l < N; ++l) {
                        const double coef = dec.y_coef(k + 1, i, j, l);
                        ynext += coef * xnext(l);
                        zdw += coef * s.sigma * dw(l);
                    }
                    const double r = ynext - yk(i, j) + driver * dt - zdw;
                    acc[static_cast<std::size_t>(k)] += r * r;
                }
            }
            for (int i = 0; i < N; ++i)
                scale[static_cast<std::size_t>(k)] += y_diag(i) * y_diag(i);
            x.swap(xnext);
        }
    }

    double worst = 0.0;
    const double entries = dec.kind == GameKind::social ? static_cast<double>(N)
                                                        : static_cast<double>(N) * N;
    for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double mean_res = acc[ku] / (entries * replications);
        const double mean_scale = std::max(scale[ku] / (N * replications), 1e-12);
        worst = std::max(worst, mean_res / mean_scale / (dt * dt));
    }
    return worst;
}

}  // namespace mfglab::lq
