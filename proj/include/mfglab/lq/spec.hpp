#pragma once

#include <cmath>
#include <string>

#include "mfglab/errors.hpp"

namespace mfglab::lq {

/// Coefficients of the scalar linear-quadratic game
///   running cost  Q x^2 + Qbar xbar^2 + R a^2 + Rbar abar^2 + Sbar x abar
///   drift         A x + Abar xbar + B a + Bbar abar
///   terminal cost QT x^2 + QbarT xbar^2
/// plus volatility, horizon and the (Gaussian) initial law. mu0_std == 0
/// means a Dirac initial mass.
struct LqSpec {
    double A = 0.0, Abar = 0.0;
    double B = 1.0, Bbar = 0.0;
    double Q = 0.0, Qbar = 0.0;
    double R = 1.0, Rbar = 0.0;
    double Sbar = 0.0;
    double QT = 0.0, QbarT = 0.0;
    double sigma = 1.0;
    double T = 1.0;
    double mu0_mean = 0.0;
    double mu0_std = 0.0;

    bool dirac_initial() const { return mu0_std == 0.0; }

    void validate() const {
        if (R == 0.0) throw ConfigError("LqSpec: R must be nonzero");
        if (!(sigma > 0.0)) throw ConfigError("LqSpec: sigma must be positive");
        if (!(T > 0.0)) throw ConfigError("LqSpec: T must be positive");
        if (!(mu0_std >= 0.0)) throw ConfigError("LqSpec: mu0_std must be >= 0");
    }

    /// The per-player optimality system divides by R + Rbar/N.
    void validate_for_nplayer(int N) const {
        validate();
        if (N < 1) throw ConfigError("LqSpec: N must be >= 1");
        if (R + Rbar / N == 0.0)
            throw ConfigError("LqSpec: R + Rbar/N vanishes for N=" + std::to_string(N));
    }

    /// The mean optimal control of the social problem divides by R + Rbar.
    void validate_for_cooperative() const {
        validate();
        if (R + Rbar == 0.0) throw ConfigError("LqSpec: R + Rbar must be nonzero");
    }
};

/// The study spec used by the convergence experiments.
inline LqSpec default_spec() {
    LqSpec s;
    s.A = 0.1;
    s.Abar = 0.2;
    s.B = 1.0;
    s.Bbar = 0.3;
    s.Q = 1.0;
    s.Qbar = 0.5;
    s.R = 1.0;
    s.Rbar = 0.2;
    s.Sbar = 0.3;
    s.QT = 1.0;
    s.QbarT = 0.5;
    s.sigma = 0.5;
    s.T = 1.0;
    s.mu0_mean = 1.0;
    s.mu0_std = 0.3;
    return s;
}

/// Linear-impact optimal-execution instance (Almgren-Chriss style):
/// inventory dX = a dt + sigma dW, running cost
///   c(a) + c_X(x) + a h2(a) - x h1bar(nu)
/// with quadratic c, c_X, terminal g and linear impact functions. Mapping to
/// LQ coordinates: R = c_quad + h2_slope, Sbar = -h1_slope, Q = cX_quad,
/// QT = g_quad, B = 1, all other interaction coefficients zero.
inline LqSpec price_impact_spec(double h1_slope, double h2_slope, double c_quad,
                                double cX_quad, double g_quad, double sigma, double T,
                                double mu0_mean = 1.0, double mu0_std = 0.5) {
    if (!(c_quad > 0.0) || !(cX_quad > 0.0) || !(g_quad > 0.0))
        throw ConfigError("price_impact_spec: quadratic coefficients must be positive");
    if (!(sigma > 0.0) || !(T > 0.0))
        throw ConfigError("price_impact_spec: sigma and T must be positive");
    const double R = c_quad + h2_slope;
    if (R <= 0.0)
        throw NonConvex("price_impact_spec: c_quad + h2_slope <= 0 breaks strong convexity");
    LqSpec s;
    s.B = 1.0;
    s.R = R;
    s.Sbar = -h1_slope;
    s.Q = cX_quad;
    s.QT = g_quad;
    s.sigma = sigma;
    s.T = T;
    s.mu0_mean = mu0_mean;
    s.mu0_std = mu0_std;
    return s;
}

inline std::string price_impact_mapping_note(double h1_slope, double h2_slope, double c_quad,
                                             double cX_quad, double g_quad) {
    return "LQ coordinates of the linear-impact execution game: R = c_quad + h2_slope = " +
           std::to_string(c_quad + h2_slope) + ", Sbar = -h1_slope = " +
           std::to_string(-h1_slope) + ", Q = cX_quad = " + std::to_string(cX_quad) +
           ", QT = g_quad = " + std::to_string(g_quad) +
           ", B = 1; A, Abar, Bbar, Qbar, Rbar, QbarT = 0";
}

}  // namespace mfglab::lq
