#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mfglab/grid.hpp"
#include "mfglab/tabular.hpp"

namespace mfglab::chaos {

/// N coupled sample paths of (X, Y, Z, alpha) on a time grid, together with
/// the Brownian increments and initial draws that generated them. Everything
/// is reconstructible from (seed, replication, N, grid, bundle) alone; the
/// optional shadow arrays hold the i.i.d. MKV copies driven by the same
/// noise and initial draws.
struct ParticleCloud {
    TimeGrid grid;
    int n_particles = 0;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::string bundle_name;

    Eigen::VectorXd x0;
    std::vector<Eigen::VectorXd> x;      // nodes 0..n
    std::vector<Eigen::VectorXd> y;      // nodes 0..n
    std::vector<Eigen::VectorXd> z;      // own-noise block, nodes 0..n-1
    std::vector<Eigen::VectorXd> alpha;  // empty unless the bundle has a control map
    std::vector<Eigen::VectorXd> dw;     // steps 0..n-1

    std::vector<double> picard_changes;  // L2(paths x time) change per iteration
    int picard_iterations = 0;

    bool has_shadow = false;
    std::vector<Eigen::VectorXd> shadow_x, shadow_y;

    /// Export to the shared tabular format: one row per grid node with the
    /// cross-sectional moments plus the full path of a few lead particles.
    Table to_table(int lead_particles = 4) const {
        Table t;
        t.set_meta("object", "particle-cloud");
        t.set_meta("bundle", bundle_name);
        t.set_meta("particles", std::to_string(n_particles));
        t.set_meta("seed", std::to_string(seed));
        t.set_meta("replication", std::to_string(replication));
        t.set_meta("picard_iterations", std::to_string(picard_iterations));
        const int lead = std::min(lead_particles, n_particles);
        std::vector<std::string> cols = {"t [time]", "mean_x [state]", "mean_y [adjoint]",
                                         "var_x [state^2]", "var_y [adjoint^2]"};
        for (int i = 0; i < lead; ++i) {
            cols.push_back("x" + std::to_string(i + 1) + " [state]");
            cols.push_back("y" + std::to_string(i + 1) + " [adjoint]");
        }
        t.set_columns(cols);
        for (int k = 0; k <= grid.n_steps; ++k) {
            const auto& xk = x[static_cast<std::size_t>(k)];
            const auto& yk = y[static_cast<std::size_t>(k)];
            const double mx = xk.mean(), my = yk.mean();
            std::vector<double> row = {grid.node(k), mx, my,
                                       (xk.array() - mx).square().mean(),
                                       (yk.array() - my).square().mean()};
            for (int i = 0; i < lead; ++i) {
                row.push_back(xk(i));
                row.push_back(yk(i));
            }
            t.add_row(row);
        }
        return t;
    }
};

}  // namespace mfglab::chaos
