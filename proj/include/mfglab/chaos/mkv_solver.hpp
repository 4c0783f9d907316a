#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/chaos/particle_solver.hpp"
#include "mfglab/chaos/regression.hpp"

namespace mfglab::chaos {

/// Node-indexed sample representation of the law flow L(X_t, Y_t).
struct LawFlow {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> xs, ys;  // per node, one entry per law particle

    MeasureView view(int node) const {
        const auto& x = xs[static_cast<std::size_t>(node)];
        const auto& y = ys[static_cast<std::size_t>(node)];
        return MeasureView::of(
            std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
            std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
    }
    double mean_x(int node) const { return xs[static_cast<std::size_t>(node)].mean(); }
    double mean_y(int node) const { return ys[static_cast<std::size_t>(node)].mean(); }
};

struct FlowSolveOptions {
    int max_outer = 60;
    double flow_tol = 1e-7;  // relative coupling distance between flow iterates
    PicardSettings picard;
};

struct MkvSolution {
    ParticleCloud cloud;  // law particles under the converged flow
    LawFlow flow;
    std::vector<double> flow_distances;  // sup-over-nodes coupling distance per outer step
    int outer_iterations = 0;
    Eigen::VectorXd value_fit_t0;  // degree-2 polynomial fit of Y_0 against X_0

    /// Decoupling-field evaluation at time zero, V(0, x).
    double value_at_time0(double x) const {
        return value_fit_t0(0) + value_fit_t0(1) * x + value_fit_t0(2) * x * x;
    }
};

/// McKean-Vlasov FBSDE solver: an outer fixed point on the measure flow.
/// Each outer step solves M decoupled FBSDEs in which every particle sees the
/// frozen flow (not the co-particle empirical measure), then replaces the
/// flow by the resulting empirical law. The stopping metric is the
/// synchronous-coupling distance between successive flows, an upper bound on
/// sup_t W2; non-contraction is the documented failure mode when uniqueness
/// fails and is surfaced, never retried.
inline MkvSolution solve_mkv_fbsde(const CoefficientBundle& cb, int M, const TimeGrid& grid,
                                   const FlowSolveOptions& opt, std::uint64_t seed,
                                   std::uint64_t replication = 0) {
    cb.validate();
    if (M < 2) throw ConfigError("solve_mkv_fbsde: need at least 2 law particles");

    MkvSolution sol;
    sol.flow.grid = grid;
    const std::size_t nodes = static_cast<std::size_t>(grid.n_steps) + 1;
    sol.flow.xs.assign(nodes, Eigen::VectorXd::Constant(M, cb.mu0_mean));
    sol.flow.ys.assign(nodes, Eigen::VectorXd::Zero(M));

    double prev_dist = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    bool converged = false;
    for (int outer = 1; outer <= opt.max_outer; ++outer) {
        const LawFlow& frozen = sol.flow;
        auto frozen_views = [&frozen](int node, const Eigen::VectorXd&, const Eigen::VectorXd&) {
            return frozen.view(node);
        };
        ParticleCloud cloud = detail::picard_solve(cb, M, grid, opt.picard, seed, replication,
                                                   frozen_views, {});

        double dist = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            const double dx = (cloud.x[k] - sol.flow.xs[k]).squaredNorm() / M;
            const double dy = (cloud.y[k] - sol.flow.ys[k]).squaredNorm() / M;
            dist = std::max(dist, std::sqrt(dx + dy));
            scale = std::max(scale, std::sqrt(cloud.x[k].squaredNorm() / M +
                                              cloud.y[k].squaredNorm() / M));
        }
        sol.flow_distances.push_back(dist);
        sol.outer_iterations = outer;
        for (std::size_t k = 0; k < nodes; ++k) {
            sol.flow.xs[k] = cloud.x[k];
            sol.flow.ys[k] = cloud.y[k];
        }
        sol.cloud = std::move(cloud);
        if (dist <= opt.flow_tol * (1.0 + scale)) {
            converged = true;
            break;
        }
        if (dist > prev_dist) {
            if (++growth_streak >= 2)
                throw FlowNotContracting(
                    "solve_mkv_fbsde: measure-flow iteration is expanding "
                    "(uniqueness of the MKV solution may fail on this horizon)");
        } else {
            growth_streak = 0;
        }
        prev_dist = dist;
    }
    if (!converged)
        throw NoConvergence("solve_mkv_fbsde: flow iteration did not reach tol within " +
                            std::to_string(opt.max_outer) + " outer iterations");

    const Eigen::MatrixXd feats = polynomial_features({sol.cloud.x[0]}, 2);
    const RidgeRegression reg(feats, opt.picard.ridge);
    sol.value_fit_t0 = reg.coefficients(sol.cloud.y[0]);
    return sol;
}

}  // namespace mfglab::chaos
