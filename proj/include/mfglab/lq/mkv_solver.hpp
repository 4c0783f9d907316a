#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/grid.hpp"
#include "mfglab/lq/spec.hpp"
#include "mfglab/ode.hpp"

namespace mfglab::lq {

enum class LimitKind { mfg, cooperative };

/// Affine decoupling of a scalar McKean-Vlasov FBSDE:
///   Y_t = eta(t) X_t + psi(t),   Z_t = eta(t) sigma,
/// with the mean pair (m, n) = (E[X_t], E[Y_t]) and the state variance `var`
/// carried along on the grid. Produced by solve_mkv_lq (Nash limit) and
/// solve_cooperative_lq (social limit).
struct MfgDecoupling {
    TimeGrid grid;
    LqSpec spec;
    LimitKind kind = LimitKind::mfg;
    std::vector<double> eta, psi, m, n, var;
    int substeps = 1;  // RK4 substeps per grid cell after refinement

    double y_of(int node, double x) const {
        return eta[static_cast<std::size_t>(node)] * x + psi[static_cast<std::size_t>(node)];
    }
    double z_of(int node) const { return eta[static_cast<std::size_t>(node)] * spec.sigma; }

    /// Equilibrium (resp. optimal) control given the adjoint value y.
    double alpha_of_y(int node, double y) const {
        const auto k = static_cast<std::size_t>(node);
        if (kind == LimitKind::mfg) return -0.5 / spec.R * spec.B * y;
        const double rr = spec.R + spec.Rbar;
        const double cx = spec.Sbar * (1.0 - spec.Rbar / rr);
        const double cy = spec.Bbar - spec.Rbar / rr * (spec.B + spec.Bbar);
        return -0.5 / spec.R * (spec.B * y + cx * m[k] + cy * n[k]);
    }
    double alpha_of_x(int node, double x) const { return alpha_of_y(node, y_of(node, x)); }

    double mean_alpha(int node) const {
        const auto k = static_cast<std::size_t>(node);
        if (kind == LimitKind::mfg) return -0.5 / spec.R * spec.B * n[k];
        const double rr = spec.R + spec.Rbar;
        return -0.5 / rr * (spec.Sbar * m[k] + (spec.B + spec.Bbar) * n[k]);
    }

    /// Drift of the decoupled forward SDE at (node, x).
    double drift_of_x(int node, double x) const {
        const auto k = static_cast<std::size_t>(node);
        return spec.A * x + spec.Abar * m[k] + spec.B * alpha_of_x(node, x) +
               spec.Bbar * mean_alpha(node);
    }

    /// Driver of the backward equation at (node, x, y).
    double driver_of(int node, double x, double y) const {
        const auto k = static_cast<std::size_t>(node);
        if (kind == LimitKind::mfg)
            return 2.0 * spec.Q * x - 0.5 * spec.Sbar / spec.R * spec.B * n[k] + spec.A * y;
        const double rr = spec.R + spec.Rbar;
        return 2.0 * spec.Q * x + (2.0 * spec.Qbar - spec.Sbar * spec.Sbar / (2.0 * rr)) * m[k] +
               spec.A * y +
               (spec.Abar - spec.Sbar * (spec.B + spec.Bbar) / (2.0 * rr)) * n[k];
    }
};

struct MkvSolveOptions {
    double eta_bound = 1e6;  // RiccatiBlowup when |eta| exceeds this
    OdeRefinement refine;
};

namespace detail {

// Coefficient bundle of the linear MKV system shared by the two limits:
//   eta' = ri0 + ri1*eta + ri2*eta^2
//   m'   = mm*m + mn*n
//   n'   = nm*m + nn*n                      (consistency: n = eta*m + psi)
//   psi' = pp*psi + pe*eta*psi + pm*m + pn*n + pem*eta*m + pen*eta*n
//   terminal: eta(T) = etaT, psi(T) = psiT_m * m(T), n(T) = kappa * m(T)
struct MkvOde {
    double ri0, ri1, ri2;
    double mm, mn, nm, nn;
    double pp, pe, pm, pn, pem, pen;
    double etaT, psiT_m, kappa;
};

inline MkvOde build_mkv_ode(const LqSpec& s, LimitKind kind) {
    MkvOde o{};
    const double tau = s.B * s.B / (2.0 * s.R);
    o.ri0 = -2.0 * s.Q;
    o.ri1 = -2.0 * s.A;
    o.ri2 = tau;
    o.etaT = 2.0 * s.QT;
    if (kind == LimitKind::mfg) {
        o.mm = s.A + s.Abar;
        o.mn = -s.B * (s.B + s.Bbar) / (2.0 * s.R);
        o.nm = -2.0 * s.Q;
        o.nn = -s.A + s.Sbar * s.B / (2.0 * s.R);
        o.pp = -s.A;
        o.pe = tau;
        o.pm = 0.0;
        o.pn = s.Sbar * s.B / (2.0 * s.R);
        o.pem = -s.Abar;
        o.pen = s.B * s.Bbar / (2.0 * s.R);
        o.psiT_m = 0.0;
        o.kappa = 2.0 * s.QT;
    } else {
        const double rr = s.R + s.Rbar;
        const double sb = s.Sbar * (s.B + s.Bbar) / (2.0 * rr);
        o.mm = s.A + s.Abar - sb;
        o.mn = -(s.B + s.Bbar) * (s.B + s.Bbar) / (2.0 * rr);
        o.nm = -(2.0 * s.Q + 2.0 * s.Qbar) + s.Sbar * s.Sbar / (2.0 * rr);
        o.nn = -s.A - s.Abar + sb;
        o.pp = -s.A;
        o.pe = tau;
        o.pm = -2.0 * s.Qbar + s.Sbar * s.Sbar / (2.0 * rr);
        o.pn = -s.Abar + sb;
        o.pem = -s.Abar + sb;
        o.pen = (2.0 * s.B * s.Bbar * s.R + s.Bbar * s.Bbar * s.R - s.B * s.B * s.Rbar) /
                (2.0 * s.R * rr);
        o.psiT_m = 2.0 * s.QbarT;
        o.kappa = 2.0 * (s.QT + s.QbarT);
    }
    return o;
}

inline MfgDecoupling solve_mkv_impl(const LqSpec& spec, const TimeGrid& grid, LimitKind kind,
                                    const MkvSolveOptions& opt) {
    if (kind == LimitKind::mfg)
        spec.validate();
    else
        spec.validate_for_cooperative();
    const MkvOde o = build_mkv_ode(spec, kind);
    using Vec2 = Eigen::Vector2d;
    using Vec4 = Eigen::Vector4d;

    auto mean_rhs = [&o](double, const Vec2& v) -> Vec2 {
        return Vec2(o.mm * v[0] + o.mn * v[1], o.nm * v[0] + o.nn * v[1]);
    };
    auto no_guard = [](const auto&) {};

    auto solve_with_substeps = [&](int sub) {
        // Two-point boundary problem for (m, n): fundamental solutions
        // forward, then one scalar solve for n(0).
        auto basis1 = integrate_forward_nodes(mean_rhs, grid, Vec2(1.0, 0.0), sub, no_guard);
        auto basis2 = integrate_forward_nodes(mean_rhs, grid, Vec2(0.0, 1.0), sub, no_guard);
        const double phi11 = basis1.back()[0], phi21 = basis1.back()[1];
        const double phi12 = basis2.back()[0], phi22 = basis2.back()[1];
        const double den = phi22 - o.kappa * phi12;
        const double scale =
            std::max({std::abs(phi22), std::abs(o.kappa * phi12), 1.0});
        if (std::abs(den) <= 1e-12 * scale)
            throw BvpSingular("solve_mkv_lq: fundamental-matrix solve for (m, n) is singular");
        const double m0 = spec.mu0_mean;
        const double n0 = m0 * (o.kappa * phi11 - phi21) / den;
        const double mT = phi11 * m0 + phi12 * n0;
        const double nT = phi21 * m0 + phi22 * n0;

        // Joint backward pass for (eta, psi, m, n).
        auto rhs = [&o](double, const Vec4& v) -> Vec4 {
            const double eta = v[0], psi = v[1], m = v[2], n = v[3];
            Vec4 d;
            d[0] = o.ri0 + o.ri1 * eta + o.ri2 * eta * eta;
            d[1] = o.pp * psi + o.pe * eta * psi + o.pm * m + o.pn * n + o.pem * eta * m +
                   o.pen * eta * n;
            d[2] = o.mm * m + o.mn * n;
            d[3] = o.nm * m + o.nn * n;
            return d;
        };
        auto guard = [&](const Vec4& v) {
            if (!(std::abs(v[0]) <= opt.eta_bound) || !std::isfinite(v[0]))
                throw RiccatiBlowup("solve_mkv_lq: Riccati field left the magnitude bound " +
                                    std::to_string(opt.eta_bound));
        };
        const Vec4 terminal(o.etaT, o.psiT_m * mT, mT, nT);
        return integrate_backward_nodes(rhs, grid, terminal, sub, guard);
    };

    // Substep halving until eta(0) stabilizes.
    std::vector<Vec4> nodes = solve_with_substeps(1);
    int used_sub = 1;
    double probe = nodes.front()[0];
    for (int sub = 2; sub <= opt.refine.max_substeps; sub *= 2) {
        auto cur = solve_with_substeps(sub);
        const double cur_probe = cur.front()[0];
        const bool done = std::abs(cur_probe - probe) < opt.refine.tol;
        nodes = std::move(cur);
        probe = cur_probe;
        used_sub = sub;
        if (done) break;
    }

    MfgDecoupling dec;
    dec.grid = grid;
    dec.spec = spec;
    dec.kind = kind;
    dec.substeps = used_sub;
    const std::size_t count = nodes.size();
    dec.eta.resize(count);
    dec.psi.resize(count);
    dec.m.resize(count);
    dec.n.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        dec.eta[k] = nodes[k][0];
        dec.psi[k] = nodes[k][1];
        dec.m[k] = nodes[k][2];
        dec.n[k] = nodes[k][3];
    }

    // State-variance flow (forward): v' = 2(A - tau*eta) v + sigma^2, with the
    // Riccati field re-integrated forward from the solved eta(0).
    auto var_rhs = [&](double, const Vec2& v) -> Vec2 {
        const double eta = v[0];
        return Vec2(o.ri0 + o.ri1 * eta + o.ri2 * eta * eta,
                    2.0 * (spec.A - o.ri2 * eta) * v[1] + spec.sigma * spec.sigma);
    };
    auto var_nodes = integrate_forward_nodes(var_rhs, grid,
                                             Vec2(dec.eta.front(), spec.mu0_std * spec.mu0_std),
                                             used_sub, no_guard);
    dec.var.resize(count);
    for (std::size_t k = 0; k < count; ++k) dec.var[k] = std::max(var_nodes[k][1], 0.0);
    return dec;
}

}  // namespace detail

/// Mean field game limit: affine decoupling of the MKV FBSDE
///   dX = (A X + Abar E[X] - B^2/(2R) Y - B Bbar/(2R) E[Y]) dt + sigma dW
///   dY = -(2Q X - Sbar B/(2R) E[Y] + A Y) dt + Z dW,  Y_T = 2 QT X_T.
inline MfgDecoupling solve_mkv_lq(const LqSpec& spec, const TimeGrid& grid,
                                  const MkvSolveOptions& opt = {}) {
    return detail::solve_mkv_impl(spec, grid, LimitKind::mfg, opt);
}

/// McKean-Vlasov control limit of the cooperative game: same decoupling
/// machinery with the social-cost adjoint driver, whose mean-derivative terms
/// do not vanish as N grows.
inline MfgDecoupling solve_cooperative_lq(const LqSpec& spec, const TimeGrid& grid,
                                          const MkvSolveOptions& opt = {}) {
    return detail::solve_mkv_impl(spec, grid, LimitKind::cooperative, opt);
}

}  // namespace mfglab::lq
