#pragma once

#include <vector>

#include "mfglab/errors.hpp"

namespace mfglab {

/// Uniform discretization of [0, T]; the last node is T exactly
/// (the final step absorbs any rounding in T*k/n).
struct TimeGrid {
    double T = 1.0;
    int n_steps = 100;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps) : T(horizon), n_steps(steps) {
        if (!(T > 0.0)) throw ConfigError("TimeGrid: T must be positive");
        if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return T / n_steps; }

    double node(int k) const { return k == n_steps ? T : T * (static_cast<double>(k) / n_steps); }

    std::vector<double> times() const {
        std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
        for (int k = 0; k <= n_steps; ++k) t[static_cast<std::size_t>(k)] = node(k);
        return t;
    }

    TimeGrid refined(int factor) const { return TimeGrid(T, n_steps * factor); }
};

}  // namespace mfglab
