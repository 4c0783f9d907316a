#pragma once

#include <Eigen/Dense>

#include "mfglab/lq/spec.hpp"

namespace mfglab::lq {

/// Statistics of the adjoint family entering the closed-form controls.
struct AdjointStats {
    double y_ii = 0.0;      // own diagonal entry Y^{i,i}
    double row_mean = 0.0;  // (1/N) sum_j Y^{i,j}
    double diag_mean = 0.0; // (1/N) sum_i Y^{i,i}
    double grand_mean = 0.0;// (1/N^2) sum_{i,j} Y^{i,j}
};

/// Closed-form evaluators of the equilibrium controls.
///
/// Nash: hat alpha^i = -(1/2R) B Y^{i,i} + remainder(X^i, Xbar, Y-statistics),
/// the remainder collecting every 1/N-weighted optimality term. Cooperative:
/// the social counterpart with O(1) mean couplings.
struct EquilibriumControlMap {
    LqSpec spec;

    /// Mean equilibrium control of the N-player Nash system.
    double nash_mean_alpha(int N, double xbar, const AdjointStats& st) const {
        const double dn = 2.0 * (spec.R + spec.Rbar / N);
        return -(spec.Sbar / N * xbar + spec.B * st.diag_mean + spec.Bbar * st.grand_mean) / dn;
    }

    double nash_main_term(const AdjointStats& st) const {
        return -0.5 / spec.R * spec.B * st.y_ii;
    }

    /// The remainder R_N of the decomposition; it vanishes identically when
    /// every interaction coefficient is zero and the off-diagonal adjoints
    /// vanish.
    double nash_remainder(int N, double x_i, double xbar, const AdjointStats& st) const {
        const double rho = (spec.Rbar / N) / (spec.R + spec.Rbar / N);
        const double bracket = spec.Sbar / N * x_i - rho * (spec.Sbar / N) * xbar +
                               spec.Bbar * st.row_mean -
                               rho * (spec.B * st.diag_mean + spec.Bbar * st.grand_mean);
        return -0.5 / spec.R * bracket;
    }

    double nash_alpha(int N, double x_i, double xbar, const AdjointStats& st) const {
        return nash_main_term(st) + nash_remainder(N, x_i, xbar, st);
    }

    /// First-order condition residual of the Nash optimality system;
    /// zero (to roundoff) at the closed-form controls.
    double nash_foc_residual(int N, double x_i, const AdjointStats& st, double alpha_i,
                             double alpha_bar) const {
        return 2.0 * spec.R * alpha_i + 2.0 * spec.Rbar / N * alpha_bar +
               spec.Sbar / N * x_i + spec.B * st.y_ii + spec.Bbar * st.row_mean;
    }

    /// Cooperative (social) optimal control of player i.
    double coop_alpha(double y_i, double xbar, double ybar) const {
        const double rr = spec.R + spec.Rbar;
        const double cx = spec.Sbar * (1.0 - spec.Rbar / rr);
        const double cy = spec.Bbar - spec.Rbar / rr * (spec.B + spec.Bbar);
        return -0.5 / spec.R * (spec.B * y_i + cx * xbar + cy * ybar);
    }

    double coop_mean_alpha(double xbar, double ybar) const {
        const double rr = spec.R + spec.Rbar;
        return -0.5 / rr * (spec.Sbar * xbar + (spec.B + spec.Bbar) * ybar);
    }

    double coop_foc_residual(double y_i, double xbar, double ybar, double alpha_i,
                             double alpha_bar) const {
        return 2.0 * spec.R * alpha_i + 2.0 * spec.Rbar * alpha_bar + spec.Sbar * xbar +
               spec.B * y_i + spec.Bbar * ybar;
    }
};

}  // namespace mfglab::lq
