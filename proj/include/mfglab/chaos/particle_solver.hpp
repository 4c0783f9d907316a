#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "mfglab/chaos/bundle.hpp"
#include "mfglab/chaos/cloud.hpp"
#include "mfglab/chaos/regression.hpp"
#include "mfglab/rng.hpp"

namespace mfglab::chaos {

struct PicardSettings {
    int max_iter = 40;
    double tol = 1e-8;       // relative L2(paths x time) change of Y
    double ridge = 1e-10;    // normal-equation regularization
    int basis_degree = 2;    // polynomial degree of the regression basis
};

namespace detail {

/// Returns the measure view a particle sees at a node. The Nash-system
/// solver views the co-particle empirical measure; the MKV solver freezes an
/// externally supplied flow. The empirical means are cross-sectional
/// constants, so the fitted projection onto the declared symmetric basis
/// (polynomials in own state, own Y-lag and the two means) equals the
/// projection onto polynomials in the per-particle statistics alone; the
/// regression therefore regresses on those.
using ViewProvider =
    std::function<MeasureView(int node, const Eigen::VectorXd& xs, const Eigen::VectorXd& ys)>;

inline ViewProvider empirical_views() {
    return [](int, const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
        return MeasureView::of(std::span<const double>(xs.data(), static_cast<std::size_t>(xs.size())),
                               std::span<const double>(ys.data(), static_cast<std::size_t>(ys.size())));
    };
}

/// Picard iteration on the coupled system: simulate the forward component
/// under the previous backward iterate, then rebuild the backward component
/// by least-squares conditional expectations, until the Y field settles.
inline ParticleCloud picard_solve(const CoefficientBundle& cb, int N, const TimeGrid& grid,
                                  const PicardSettings& settings, std::uint64_t seed,
                                  std::uint64_t replication, const ViewProvider& view_at,
                                  const std::optional<Eigen::VectorXd>& x0_override) {
    cb.validate();
    if (N < 2) throw ConfigError("solve_particle_fbsde: N must be >= 2");
    if (settings.max_iter < 1) throw ConfigError("solve_particle_fbsde: max_iter must be >= 1");

    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);

    ParticleCloud cloud;
    cloud.grid = grid;
    cloud.n_particles = N;
    cloud.seed = seed;
    cloud.replication = replication;
    cloud.bundle_name = cb.name;

    CounterRng inc_rng(StreamKey{seed, rng_purpose::kIncrements, replication});
    CounterRng init_rng(StreamKey{seed, rng_purpose::kInitialDraws, replication});

    if (x0_override) {
        if (x0_override->size() != N)
            throw ConfigError("solve_particle_fbsde: x0 override size mismatch");
        cloud.x0 = *x0_override;
    } else {
        cloud.x0.resize(N);
        for (int i = 0; i < N; ++i)
            cloud.x0(i) =
                cb.mu0_mean + cb.mu0_std * init_rng.normal(static_cast<std::uint64_t>(i), 0, 0);
    }
    cloud.dw.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cloud.dw[static_cast<std::size_t>(k)].resize(N);
        for (int i = 0; i < N; ++i)
            cloud.dw[static_cast<std::size_t>(k)](i) =
                sqdt * inc_rng.normal(static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(k), 0);
    }

    std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(n) + 1, Eigen::VectorXd::Zero(N));
    std::vector<Eigen::VectorXd> y(static_cast<std::size_t>(n) + 1, Eigen::VectorXd::Zero(N));
    std::vector<Eigen::VectorXd> ynew(static_cast<std::size_t>(n) + 1, Eigen::VectorXd::Zero(N));
    std::vector<Eigen::VectorXd> z(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(N));

    double prev_change = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    bool converged = false;

    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        // forward Euler-Maruyama under the previous Y field
        x[0] = cloud.x0;
        for (int k = 0; k < n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const MeasureView view = view_at(k, x[ku], y[ku]);
            Eigen::VectorXd drift(N);
            const double t = grid.node(k);
            for (int i = 0; i < N; ++i) drift(i) = cb.drift(t, x[ku](i), y[ku](i), view);
            x[ku + 1] = x[ku] + dt * drift + cb.sigma * cloud.dw[ku];
            if (!x[ku + 1].allFinite())
                throw PicardDiverged("solve_particle_fbsde: forward state blew up");
        }

        // backward regression sweep
        {
            const auto nu = static_cast<std::size_t>(n);
            const MeasureView view = view_at(n, x[nu], y[nu]);
            for (int i = 0; i < N; ++i) ynew[nu](i) = cb.terminal(x[nu](i), view);
        }
        for (int k = n - 1; k >= 0; --k) {
            const auto ku = static_cast<std::size_t>(k);
            const Eigen::MatrixXd feats =
                polynomial_features({x[ku], y[ku]}, settings.basis_degree);
            const RidgeRegression reg(feats, settings.ridge);
            const Eigen::VectorXd ce = reg.fitted(ynew[ku + 1]);
            const Eigen::VectorXd zfit =
                reg.fitted(ynew[ku + 1].cwiseProduct(cloud.dw[ku]) / dt);
            const MeasureView view = view_at(k, x[ku], ce);
            const double t = grid.node(k);
            for (int i = 0; i < N; ++i)
                ynew[ku](i) = ce(i) + dt * cb.driver(t, x[ku](i), ce(i), zfit(i), view);
            z[ku] = zfit;
        }

        double change_sq = 0.0, scale_sq = 0.0;
        for (int k = 0; k <= n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            change_sq += dt * (ynew[ku] - y[ku]).squaredNorm() / N;
            scale_sq += dt * ynew[ku].squaredNorm() / N;
        }
        const double change = std::sqrt(change_sq);
        cloud.picard_changes.push_back(change);
        cloud.picard_iterations = iter;
        for (int k = 0; k <= n; ++k) y[static_cast<std::size_t>(k)] = ynew[static_cast<std::size_t>(k)];

        if (change <= settings.tol * (1.0 + std::sqrt(scale_sq))) {
            converged = true;
            break;
        }
        if (change > prev_change) {
            if (++growth_streak >= 3)
                throw PicardDiverged(
                    "solve_particle_fbsde: Y-change grew 3 consecutive iterations "
                    "(horizon beyond the small-time contraction regime; shorten T)");
        } else {
            growth_streak = 0;
        }
        prev_change = change;
    }
    if (!converged)
        throw NoConvergence("solve_particle_fbsde: Picard iteration did not reach tol within " +
                            std::to_string(settings.max_iter) + " iterations");

    cloud.x = std::move(x);
    cloud.y = std::move(y);
    cloud.z = std::move(z);
    if (cb.control) {
        cloud.alpha.resize(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const MeasureView view = view_at(k, cloud.x[ku], cloud.y[ku]);
            cloud.alpha[ku].resize(N);
            for (int i = 0; i < N; ++i)
                cloud.alpha[ku](i) = cb.control(cloud.x[ku](i), cloud.y[ku](i), view);
        }
    }
    return cloud;
}

}  // namespace detail

/// Coupled N-particle forward-backward solver (interaction through the
/// co-particle empirical measure).
inline ParticleCloud solve_particle_fbsde(const CoefficientBundle& cb, int N,
                                          const TimeGrid& grid, const PicardSettings& settings,
                                          std::uint64_t seed, std::uint64_t replication = 0,
                                          const std::optional<Eigen::VectorXd>& x0 = {}) {
    return detail::picard_solve(cb, N, grid, settings, seed, replication,
                                detail::empirical_views(), x0);
}

}  // namespace mfglab::chaos
