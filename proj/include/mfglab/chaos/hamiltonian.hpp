#pragma once

#include <cmath>
#include <functional>

#include "mfglab/chaos/measure.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/rng.hpp"

namespace mfglab::chaos {

/// Control-dependent parts of a game's Hamiltonian, H = f1 + b1*y + (terms
/// without the own control). gamma is the strong-convexity modulus of H in
/// the control; the admissible set is either all of R or a box.
struct HamiltonianBundle {
    using Fn = std::function<double(double t, double x, double a, const MeasureView& mu)>;
    Fn f1, b1;
    Fn da_f1, da_b1;  // control derivatives
    double gamma = 1.0;
    bool boxed = false;
    double lo = 0.0, hi = 0.0;
};

struct MinimizeResult {
    double alpha = 0.0;
    bool active_bound = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Finite-difference consistency of the declared control-derivatives against
/// f1/b1 on random probe points; relative tolerance 1e-4.
inline bool hamiltonian_derivatives_consistent(const HamiltonianBundle& hb, std::uint64_t seed,
                                               int probes = 32, double tol = 1e-4) {
    CounterRng rng(StreamKey{seed, rng_purpose::kProbe, 0});
    for (int i = 0; i < probes; ++i) {
        const double t = rng.uniform(static_cast<std::uint64_t>(i), 0, 0);
        const double x = 2.0 * rng.normal(static_cast<std::uint64_t>(i), 1, 0);
        const double a = 2.0 * rng.normal(static_cast<std::uint64_t>(i), 2, 0);
        const double mx = rng.normal(static_cast<std::uint64_t>(i), 3, 0);
        const MeasureView mu = MeasureView::moments(mx, 0.0);
        const double h = 1e-5 * (1.0 + std::abs(a));
        const double fd_f = (hb.f1(t, x, a + h, mu) - hb.f1(t, x, a - h, mu)) / (2.0 * h);
        const double fd_b = (hb.b1(t, x, a + h, mu) - hb.b1(t, x, a - h, mu)) / (2.0 * h);
        const double df = hb.da_f1(t, x, a, mu);
        const double db = hb.da_b1(t, x, a, mu);
        if (std::abs(fd_f - df) > tol * (1.0 + std::abs(df))) return false;
        if (std::abs(fd_b - db) > tol * (1.0 + std::abs(db))) return false;
    }
    return true;
}

/// Pointwise Hamiltonian minimizer: solves
///   da_f1(t,x,a,mu) + da_b1(t,x,a,mu) * y = chi
/// by safeguarded damped Newton (bisection fallback inside a sign-changing
/// bracket), projected onto the admissible box when one is declared.
/// Strong convexity makes the first-order map strictly increasing, which the
/// iteration monitors rather than assumes.
inline MinimizeResult minimize_hamiltonian(const HamiltonianBundle& hb, double t, double x,
                                           double y, const MeasureView& mu, double chi,
                                           int max_iter = 100) {
    if (!std::isfinite(t) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(chi))
        throw OutsideDomain("minimize_hamiltonian: non-finite input");
    if (!(hb.gamma > 0.0)) throw ConfigError("minimize_hamiltonian: gamma must be positive");

    auto foc = [&](double a) { return hb.da_f1(t, x, a, mu) + hb.da_b1(t, x, a, mu) * y - chi; };
    const double res_tol = 1e-10 * (1.0 + std::abs(chi));

    MinimizeResult out;
    if (hb.boxed) {
        if (!(hb.lo <= hb.hi)) throw ConfigError("minimize_hamiltonian: empty admissible box");
        // derivative positive at the lower edge => minimizer sits there
        if (foc(hb.lo) >= 0.0) {
            out.alpha = hb.lo;
            out.active_bound = foc(hb.lo) > res_tol;
            out.residual = std::abs(std::min(foc(hb.lo), 0.0));
            return out;
        }
        if (foc(hb.hi) <= 0.0) {
            out.alpha = hb.hi;
            out.active_bound = foc(hb.hi) < -res_tol;
            out.residual = std::abs(std::max(foc(hb.hi), 0.0));
            return out;
        }
    }

    // bracket a sign change
    double lo = hb.boxed ? hb.lo : -1.0;
    double hi = hb.boxed ? hb.hi : 1.0;
    if (!hb.boxed) {
        double width = 1.0;
        int expansions = 0;
        while (foc(lo) > 0.0 || foc(hi) < 0.0) {
            width *= 2.0;
            lo = -width;
            hi = width;
            if (++expansions > 60)
                throw NoConvergence("minimize_hamiltonian: no sign change found; "
                                    "bundle violates the stated convexity");
        }
    }

    double a = 0.5 * (lo + hi);
    double r = foc(a);
    for (int it = 1; it <= max_iter; ++it) {
        out.iterations = it;
        if (std::abs(r) <= res_tol) {
            out.alpha = a;
            out.residual = std::abs(r);
            return out;
        }
        if (r > 0.0)
            hi = a;
        else
            lo = a;
        const double h = 1e-7 * (1.0 + std::abs(a));
        const double slope = (foc(a + h) - foc(a - h)) / (2.0 * h);
        double next = slope > 0.0 ? a - r / slope : a;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // damping
        a = next;
        r = foc(a);
    }
    throw NoConvergence("minimize_hamiltonian: residual " + std::to_string(std::abs(r)) +
                        " after max_iter iterations");
}

}  // namespace mfglab::chaos
