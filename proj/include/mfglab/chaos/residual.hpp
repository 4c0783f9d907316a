#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "mfglab/chaos/bundle.hpp"
#include "mfglab/chaos/cloud.hpp"
#include "mfglab/tabular.hpp"

namespace mfglab::chaos {

/// Discrete martingale check of the backward equation (diagnostic; never
/// throws). Per-node E|Y_{k+1} - Y_k + F dt - Z dW|^2 and the terminal
/// mismatch E|Y_T - G(X_T, L^N(X_T))|^2, both relative to the time-averaged
/// E|Y|^2.
struct ResidualReport {
    std::vector<double> node_residual;  // relative, one per step
    double max_node_residual = 0.0;
    double terminal_mismatch = 0.0;  // relative
    double y_scale_sq = 0.0;         // time-averaged E|Y|^2

    Table to_table(const TimeGrid& grid) const {
        Table t;
        t.set_meta("object", "fbsde-residual");
        t.set_meta("max_node_residual [rel]", format_double(max_node_residual));
        t.set_meta("terminal_mismatch [rel]", format_double(terminal_mismatch));
        t.set_columns({"t [time]", "residual [rel]"});
        for (std::size_t k = 0; k < node_residual.size(); ++k)
            t.add_row({grid.node(static_cast<int>(k)), node_residual[k]});
        return t;
    }
};

inline ResidualReport fbsde_residual(const ParticleCloud& cloud, const CoefficientBundle& cb) {
    const int n = cloud.grid.n_steps;
    const int N = cloud.n_particles;
    const double dt = cloud.grid.dt();

    ResidualReport rep;
    double scale = 0.0;
    for (int k = 0; k <= n; ++k)
        scale += cloud.y[static_cast<std::size_t>(k)].squaredNorm() / N;
    scale /= (n + 1);
    rep.y_scale_sq = scale;
    const double guard = std::max(scale, 1e-300);

    rep.node_residual.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const MeasureView view = MeasureView::of(
            std::span<const double>(cloud.x[ku].data(), static_cast<std::size_t>(N)),
            std::span<const double>(cloud.y[ku].data(), static_cast<std::size_t>(N)));
        double acc = 0.0;
        const double t = cloud.grid.node(k);
        for (int i = 0; i < N; ++i) {
            const double f = cb.driver(t, cloud.x[ku](i), cloud.y[ku](i), cloud.z[ku](i), view);
            const double r = cloud.y[ku + 1](i) - cloud.y[ku](i) + f * dt -
                             cloud.z[ku](i) * cloud.dw[ku](i);
            acc += r * r;
        }
        rep.node_residual[ku] = acc / N / guard;
    }
    rep.max_node_residual =
        rep.node_residual.empty()
            ? 0.0
            : *std::max_element(rep.node_residual.begin(), rep.node_residual.end());

    {
        const auto nu = static_cast<std::size_t>(n);
        const MeasureView view = MeasureView::of(
            std::span<const double>(cloud.x[nu].data(), static_cast<std::size_t>(N)),
            std::span<const double>(cloud.y[nu].data(), static_cast<std::size_t>(N)));
        double acc = 0.0;
        for (int i = 0; i < N; ++i) {
            const double r = cloud.y[nu](i) - cb.terminal(cloud.x[nu](i), view);
            acc += r * r;
        }
        rep.terminal_mismatch = acc / N / guard;
    }
    return rep;
}

}  // namespace mfglab::chaos
