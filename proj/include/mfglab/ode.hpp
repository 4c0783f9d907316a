#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mfglab/errors.hpp"
#include "mfglab/grid.hpp"

namespace mfglab {

// Classical fixed-step RK4. Terminal-value problems are integrated backward
// (negative step); states are stored at the TimeGrid nodes. The `solve_*`
// wrappers halve the substep size until a caller-supplied probe of the
// initial-time state stabilizes.

template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Integrate dy/dt = f(t,y) backward from y(T)=terminal, storing y at every
/// grid node (index 0 is t=0). `substeps` RK4 steps are taken per grid cell.
/// `guard` (optional) is invoked on every intermediate state and may throw.
template <class State, class Rhs, class Guard>
std::vector<State> integrate_backward_nodes(const Rhs& f, const TimeGrid& grid,
                                            const State& terminal, int substeps,
                                            const Guard& guard) {
    std::vector<State> nodes(static_cast<std::size_t>(grid.n_steps) + 1, terminal);
    State y = terminal;
    guard(y);
    for (int k = grid.n_steps; k > 0; --k) {
        const double t1 = grid.node(k);
        const double t0 = grid.node(k - 1);
        const double h = (t0 - t1) / substeps;
        double t = t1;
        for (int s = 0; s < substeps; ++s) {
            y = rk4_step(f, t, y, h);
            t += h;
            guard(y);
        }
        nodes[static_cast<std::size_t>(k - 1)] = y;
    }
    return nodes;
}

template <class State, class Rhs, class Guard>
std::vector<State> integrate_forward_nodes(const Rhs& f, const TimeGrid& grid,
                                           const State& initial, int substeps,
                                           const Guard& guard) {
    std::vector<State> nodes(static_cast<std::size_t>(grid.n_steps) + 1, initial);
    State y = initial;
    guard(y);
    for (int k = 0; k < grid.n_steps; ++k) {
        const double t0 = grid.node(k);
        const double t1 = grid.node(k + 1);
        const double h = (t1 - t0) / substeps;
        double t = t0;
        for (int s = 0; s < substeps; ++s) {
            y = rk4_step(f, t, y, h);
            t += h;
            guard(y);
        }
        nodes[static_cast<std::size_t>(k + 1)] = y;
    }
    return nodes;
}

struct OdeRefinement {
    double tol = 1e-10;   // stop when the probe changes by less than this
    int max_substeps = 64;
};

/// Backward integration with substep halving until `probe(state at t=0)`
/// changes by < tol between successive refinements. Returns the node values
/// of the finer run.
template <class State, class Rhs, class Guard, class Probe>
std::vector<State> integrate_backward_refined(const Rhs& f, const TimeGrid& grid,
                                              const State& terminal, const Guard& guard,
                                              const Probe& probe,
                                              const OdeRefinement& opt = {}) {
    std::vector<State> prev = integrate_backward_nodes(f, grid, terminal, 1, guard);
    double prev_probe = probe(prev.front());
    for (int sub = 2; sub <= opt.max_substeps; sub *= 2) {
        std::vector<State> cur = integrate_backward_nodes(f, grid, terminal, sub, guard);
        const double cur_probe = probe(cur.front());
        if (std::abs(cur_probe - prev_probe) < opt.tol) return cur;
        prev = std::move(cur);
        prev_probe = cur_probe;
    }
    return prev;
}

}  // namespace mfglab
