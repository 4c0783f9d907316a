#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mfglab/chaos/measure.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/lq/spec.hpp"

namespace mfglab::chaos {

/// User-supplied coefficients of a coupled forward-backward particle system
///   dX^i = B(t, X^i, Y^i, L^N) dt + sigma dW^i
///   dY^i = -F(t, X^i, Y^i, Z^{i,i}, L^N) dt + sum_k Z^{i,k} dW^k
///   Y^i_T = G(X^i_T, L^N(X_T)).
/// Declared dimensions are carried for rate-table bookkeeping; this engine
/// integrates the scalar case ell = q = d = 1 and rejects anything else.
struct CoefficientBundle {
    std::string name;
    int ell = 1, q = 1, d = 1;
    double lipschitz_const = 1.0;  // user-asserted L_f
    bool growth_b2prime = false;   // bounded-terminal growth regime flag
    double sigma = 1.0;
    double mu0_mean = 0.0;
    double mu0_std = 0.0;

    std::function<double(double t, double x, double y, const MeasureView&)> drift;
    std::function<double(double t, double x, double y, double z, const MeasureView&)> driver;
    std::function<double(double x, const MeasureView&)> terminal;
    /// Optional game-control map alpha(x, y, measure) for gap studies.
    std::function<double(double x, double y, const MeasureView&)> control;

    void validate() const {
        if (ell != 1 || q != 1 || d != 1)
            throw ConfigError("CoefficientBundle '" + name +
                              "': this engine integrates scalar systems (ell = q = d = 1)");
        if (!(sigma > 0.0)) throw ConfigError("CoefficientBundle: sigma must be positive");
        if (!(mu0_std >= 0.0)) throw ConfigError("CoefficientBundle: mu0_std must be >= 0");
        if (!drift || !driver || !terminal)
            throw ConfigError("CoefficientBundle '" + name + "': missing coefficient callable");
    }
};

/// LQ mean-field bundle: the limit FBSDE of the Nash system with the law
/// replaced by whatever measure the solver supplies.
inline CoefficientBundle lq_bundle(const lq::LqSpec& s) {
    s.validate();
    CoefficientBundle cb;
    cb.name = "lq";
    cb.sigma = s.sigma;
    cb.mu0_mean = s.mu0_mean;
    cb.mu0_std = s.mu0_std;
    const double tau = s.B * s.B / (2.0 * s.R);
    const double taub = s.B * s.Bbar / (2.0 * s.R);
    const double sb = s.Sbar * s.B / (2.0 * s.R);
    cb.lipschitz_const = std::abs(s.A) + std::abs(s.Abar) + 2.0 * std::abs(s.Q) + tau + taub +
                         std::abs(sb) + 2.0 * std::abs(s.QT);
    cb.drift = [s, tau, taub](double, double x, double y, const MeasureView& mu) {
        return s.A * x + s.Abar * mu.mean_x - tau * y - taub * mu.mean_y;
    };
    cb.driver = [s, sb](double, double x, double y, double, const MeasureView& mu) {
        return 2.0 * s.Q * x + s.A * y - sb * mu.mean_y;
    };
    cb.terminal = [s](double x, const MeasureView&) { return 2.0 * s.QT * x; };
    cb.control = [s](double, double y, const MeasureView&) { return -0.5 / s.R * s.B * y; };
    return cb;
}

/// Price-impact instance routed through the same LQ coordinates.
inline CoefficientBundle price_impact_bundle(double h1_slope, double h2_slope, double c_quad,
                                             double cX_quad, double g_quad, double sigma,
                                             double T) {
    auto spec = lq::price_impact_spec(h1_slope, h2_slope, c_quad, cX_quad, g_quad, sigma, T);
    CoefficientBundle cb = lq_bundle(spec);
    cb.name = "price-impact";
    return cb;
}

/// Bounded nonlinear demo: tanh-saturated drift with state-law coupling,
/// bounded terminal condition (the (B2') growth regime).
inline CoefficientBundle tanh_drift_bundle(double sigma = 0.4, double mu0_mean = 0.5,
                                           double mu0_std = 0.3) {
    CoefficientBundle cb;
    cb.name = "tanh-drift";
    cb.sigma = sigma;
    cb.mu0_mean = mu0_mean;
    cb.mu0_std = mu0_std;
    cb.lipschitz_const = 1.0;
    cb.growth_b2prime = true;
    cb.drift = [](double, double x, double y, const MeasureView& mu) {
        return -0.5 * std::tanh(x) + 0.3 * std::tanh(mu.mean_x) - 0.2 * y;
    };
    cb.driver = [](double, double x, double y, double, const MeasureView& mu) {
        return 0.4 * std::tanh(x) - 0.3 * y + 0.2 * std::tanh(mu.mean_y);
    };
    cb.terminal = [](double x, const MeasureView&) { return 0.5 * std::tanh(x); };
    return cb;
}

/// Demo with control interaction: the measure enters through both marginals
/// and the driver reads the own-noise Z block.
inline CoefficientBundle tanh_coupled_bundle(double sigma = 0.4, double mu0_mean = 0.0,
                                             double mu0_std = 0.5) {
    CoefficientBundle cb;
    cb.name = "tanh-coupled";
    cb.sigma = sigma;
    cb.mu0_mean = mu0_mean;
    cb.mu0_std = mu0_std;
    cb.lipschitz_const = 1.2;
    cb.growth_b2prime = true;
    cb.drift = [](double, double x, double y, const MeasureView& mu) {
        return 0.3 * std::tanh(mu.mean_x - x) - 0.4 * y + 0.1 * std::tanh(mu.mean_y);
    };
    cb.driver = [](double, double x, double y, double z, const MeasureView& mu) {
        return 0.5 * std::tanh(x - mu.mean_x) - 0.2 * y + 0.15 * z;
    };
    cb.terminal = [](double x, const MeasureView& mu) {
        return 0.4 * std::tanh(x) + 0.2 * std::tanh(mu.mean_x);
    };
    return cb;
}

inline std::vector<std::string> registered_bundles() {
    return {"lq", "price-impact", "tanh-drift", "tanh-coupled"};
}

/// Built-in registry; the LQ spec supplies the coefficients for the game
/// bundles and is ignored by the fixed demos.
inline CoefficientBundle make_bundle(const std::string& name, const lq::LqSpec& spec) {
    if (name == "lq") return lq_bundle(spec);
    if (name == "price-impact") {
        CoefficientBundle cb = lq_bundle(spec);
        cb.name = "price-impact";
        return cb;
    }
    if (name == "tanh-drift") return tanh_drift_bundle(spec.sigma, spec.mu0_mean, spec.mu0_std);
    if (name == "tanh-coupled")
        return tanh_coupled_bundle(spec.sigma, spec.mu0_mean, spec.mu0_std);
    throw ConfigError("unknown bundle '" + name + "'");
}

}  // namespace mfglab::chaos
