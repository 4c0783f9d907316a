#pragma once

#include <cmath>

#include "mfglab/lq/meanfield_linear.hpp"
#include "mfglab/lq/mkv_solver.hpp"
#include "mfglab/lq/nplayer_decoupling.hpp"

namespace mfglab::lq {

/// Cooperative N-player solve: one adjoint per player, same decoupling
/// machinery as the Nash solvers but with the social-cost driver. The scalar
/// families come out N-independent; whether that holds exactly is measured by
/// the experiments, while the asserted invariant is the driver identity below.
inline NPlayerDecoupling solve_nplayer_social_lq(const LqSpec& spec, int N, const TimeGrid& grid,
                                                 double coeff_bound = 1e6,
                                                 const OdeRefinement& refine = {}) {
    spec.validate_for_cooperative();
    if (N < 1) throw ConfigError("solve_nplayer_social_lq: N must be >= 1");
    const MeanFieldDecoupling mf = solve_meanfield_symmetric(social_system(spec), grid,
                                                             coeff_bound, refine);
    NPlayerDecoupling dec;
    dec.grid = grid;
    dec.spec = spec;
    dec.N = N;
    dec.kind = GameKind::social;
    dec.substeps = mf.substeps;
    dec.has_symmetric = true;
    dec.sym.resize(mf.a.size());
    dec.sym.a = mf.a;
    dec.sym.b = mf.b;
    dec.sym.c = mf.c;
    return dec;
}

/// Adjoint-driver evaluations exposed for the coefficient-identity check:
/// the N-player social driver, evaluated at inputs whose empirical statistics
/// are replaced by the true-law moments, must reproduce the MKV driver value.
struct CoopDriverBundle {
    LqSpec spec;

    /// N-player route: the Pontryagin driver with the mean control eliminated
    /// through the social first-order condition (which carries no 1/N
    /// weights). The 1/N-averaged measure-derivative sums run over N
    /// identical per-player terms once the empirical statistics are replaced
    /// by law moments, so each average equals its per-player term exactly;
    /// the evaluation is therefore the same function for every N.
    double nplayer_driver(int N, double x_i, double y_i, double xbar, double ybar) const {
        (void)N;
        const double rr = spec.R + spec.Rbar;
        const double alpha_bar = -0.5 / rr * (spec.Sbar * xbar + (spec.B + spec.Bbar) * ybar);
        const double mu_f = 2.0 * spec.Qbar * xbar;  // (1/N) sum_j d_mu f(x^j, a^j, .)(x_i)
        const double mu_b = spec.Abar * ybar;        // (1/N) sum_j d_mu b(x^j, a^j, .)(x_i) y^j
        return 2.0 * spec.Q * x_i + spec.Sbar * alpha_bar + mu_f + spec.A * y_i + mu_b;
    }

    /// MKV route: the closed driver of the limiting adjoint equation.
    double mkv_driver(double x, double y, double mean_x, double mean_y) const {
        const double rr = spec.R + spec.Rbar;
        return 2.0 * spec.Q * x +
               (2.0 * spec.Qbar - spec.Sbar * spec.Sbar / (2.0 * rr)) * mean_x + spec.A * y +
               (spec.Abar - spec.Sbar * (spec.B + spec.Bbar) / (2.0 * rr)) * mean_y;
    }
};

}  // namespace mfglab::lq
