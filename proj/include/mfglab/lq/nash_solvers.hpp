#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/grid.hpp"
#include "mfglab/lq/nplayer_decoupling.hpp"
#include "mfglab/lq/spec.hpp"
#include "mfglab/ode.hpp"

namespace mfglab::lq {

struct NPlayerSolveOptions {
    double coeff_bound = 1e6;  // RiccatiBlowup guard on every scalar family
    int dense_limit = 64;
    OdeRefinement refine;
};

namespace detail {

// Shared algebra of the per-step optimality elimination. For an affine
// Y-representation the controls, forward drift and backward driver are all
// affine in the state; the specific maps differ between the two encodings
// below but implement the same formulas:
//   0 = 2R a^i + (2 Rbar/N) abar + (Sbar/N) X^i + B Y^{ii} + Bbar rowmean_i
//   drift^i    = A X^i + Abar Xbar + B a^i + Bbar abar
//   driver^ij  = delta_ij (2Q X^i + Sbar abar) + (2 Qbar/N) Xbar
//                + A Y^{ij} + Abar rowmean_i.

inline Eigen::Matrix<double, 7, 1> nash_symmetric_rhs(const LqSpec& s, int N,
                                                      const Eigen::Matrix<double, 7, 1>& v) {
    const double a = v[0], b = v[1], c = v[2], d = v[3], e = v[4], f = v[5], g = v[6];
    const double nm1 = static_cast<double>(N - 1);
    const double wi = (a + (d * nm1 - e) / N) / N;
    const double wx = (b + e + f * nm1 / N) / N;
    const double wc = (c + g * nm1 / N) / N;
    const double vx = ((a + b) + (d + e + f) * nm1 / N) / N;
    const double vc = (c + g * nm1 / N) / N;

    const double dn = 2.0 * (s.R + s.Rbar / N);
    const double ux = -(s.Sbar / N + s.B * (a + b) + s.Bbar * vx) / dn;
    const double uc = -(s.B * c + s.Bbar * vc) / dn;
    const double si = -(s.Sbar / N + s.B * a + s.Bbar * wi) / (2.0 * s.R);
    const double sx = -(s.B * b + s.Bbar * wx + 2.0 * s.Rbar / N * ux) / (2.0 * s.R);
    const double sc = -(s.B * c + s.Bbar * wc + 2.0 * s.Rbar / N * uc) / (2.0 * s.R);
    const double Fi = s.A + s.B * si;
    const double Fx = s.Abar + s.B * sx + s.Bbar * ux;
    const double Fc = s.B * sc + s.Bbar * uc;

    Eigen::Matrix<double, 7, 1> out;
    out[0] = -a * Fi - (2.0 * s.Q + s.A * a + s.Abar * wi);
    out[1] = -a * Fx - b * (Fi + Fx) - (s.Sbar * ux + 2.0 * s.Qbar / N + s.A * b + s.Abar * wx);
    out[2] = -(a + b) * Fc - (s.Sbar * uc + s.A * c + s.Abar * wc);
    out[3] = -d * Fi - (s.A * d + N * s.Abar * wi);
    out[4] = -e * Fi - s.A * e;
    out[5] = -(d + e) * Fx - f * (Fi + Fx) - (2.0 * s.Qbar + s.A * f + N * s.Abar * wx);
    out[6] = -(d + e + f) * Fc - (s.A * g + N * s.Abar * wc);
    return out;
}

struct DenseState {
    Eigen::MatrixXd p;  // (N*N) x N
    Eigen::VectorXd q;  // N*N

    DenseState operator+(const DenseState& o) const { return {p + o.p, q + o.q}; }
    friend DenseState operator*(double s, const DenseState& st) { return {s * st.p, s * st.q}; }
};

inline DenseState nash_dense_rhs(const LqSpec& s, int N, const DenseState& st) {
    const Eigen::MatrixXd& p = st.p;
    const Eigen::VectorXd& q = st.q;

    Eigen::MatrixXd diag_rows(N, N);   // rows (i,i) of P
    Eigen::MatrixXd row_mean(N, N);    // (1/N) sum_j P[(i,j),:]
    Eigen::VectorXd diag_q(N), row_mean_q(N);
    for (int i = 0; i < N; ++i) {
        diag_rows.row(i) = p.row(i * N + i);
        diag_q(i) = q(i * N + i);
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(N);
        double accq = 0.0;
        for (int j = 0; j < N; ++j) {
            acc += p.row(i * N + j);
            accq += q(i * N + j);
        }
        row_mean.row(i) = acc / N;
        row_mean_q(i) = accq / N;
    }
    const Eigen::RowVectorXd diag_mean = diag_rows.colwise().mean();
    const Eigen::RowVectorXd grand_mean = row_mean.colwise().mean();
    const double diag_mean_q = diag_q.mean();
    const double grand_mean_q = row_mean_q.mean();

    const double dn = 2.0 * (s.R + s.Rbar / N);
    const Eigen::RowVectorXd unit_mean = Eigen::RowVectorXd::Constant(N, 1.0 / N);
    const Eigen::RowVectorXd abar_x =
        -(s.Sbar / N * unit_mean + s.B * diag_mean + s.Bbar * grand_mean) / dn;
    const double abar_c = -(s.B * diag_mean_q + s.Bbar * grand_mean_q) / dn;

    Eigen::MatrixXd alpha_x(N, N);  // control of player i as a row functional of X
    Eigen::VectorXd alpha_c(N);
    for (int i = 0; i < N; ++i) {
        Eigen::RowVectorXd row = s.B * diag_rows.row(i) + s.Bbar * row_mean.row(i) +
                                 2.0 * s.Rbar / N * abar_x;
        row(i) += s.Sbar / N;
        alpha_x.row(i) = -row / (2.0 * s.R);
        alpha_c(i) = -(s.B * diag_q(i) + s.Bbar * row_mean_q(i) + 2.0 * s.Rbar / N * abar_c) /
                     (2.0 * s.R);
    }

    Eigen::MatrixXd drift(N, N);  // forward drift as a matrix on the state stack
    Eigen::VectorXd drift_c(N);
    for (int i = 0; i < N; ++i) {
        Eigen::RowVectorXd row =
            s.Abar * unit_mean + s.B * alpha_x.row(i) + s.Bbar * abar_x;
        row(i) += s.A;
        drift.row(i) = row;
        drift_c(i) = s.B * alpha_c(i) + s.Bbar * abar_c;
    }

    DenseState out;
    out.p = -(p * drift);
    out.q = -(p * drift_c);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const int r = i * N + j;
            Eigen::RowVectorXd drv =
                2.0 * s.Qbar / N * unit_mean + s.A * p.row(r) + s.Abar * row_mean.row(i);
            double drv_c = s.A * q(r) + s.Abar * row_mean_q(i);
            if (i == j) {
                drv += s.Sbar * abar_x;
                drv(i) += 2.0 * s.Q;
                drv_c += s.Sbar * abar_c;
            }
            out.p.row(r) -= drv;
            out.q(r) -= drv_c;
        }
    }
    return out;
}

}  // namespace detail

/// Exchangeable-ansatz solver: the seven scalar terminal-value ODE families
/// obtained by substituting the symmetric ansatz into the N-player FBSDE and
/// matching coefficients of X^i, X^j, Xbar and 1. Its correctness is enforced
/// by the dense-oracle agreement test.
inline NPlayerDecoupling solve_nplayer_lq_symmetric(const LqSpec& spec, int N,
                                                    const TimeGrid& grid,
                                                    const NPlayerSolveOptions& opt = {}) {
    spec.validate_for_nplayer(N);
    if (N < 2) throw ConfigError("solve_nplayer_lq_symmetric: N must be >= 2");
    using Vec7 = Eigen::Matrix<double, 7, 1>;
    auto rhs = [&spec, N](double, const Vec7& v) { return detail::nash_symmetric_rhs(spec, N, v); };
    auto guard = [&opt](const Vec7& v) {
        if (!v.allFinite() || v.cwiseAbs().maxCoeff() > opt.coeff_bound)
            throw RiccatiBlowup("solve_nplayer_lq_symmetric: coefficient left magnitude bound");
    };
    Vec7 terminal;
    terminal << 2.0 * spec.QT, 2.0 * spec.QbarT / N, 0.0, 0.0, 0.0, 2.0 * spec.QbarT, 0.0;

    std::vector<Vec7> nodes = integrate_backward_nodes(rhs, grid, terminal, 1, guard);
    int used_sub = 1;
    double probe = nodes.front()[0];
    for (int sub = 2; sub <= opt.refine.max_substeps; sub *= 2) {
        auto cur = integrate_backward_nodes(rhs, grid, terminal, sub, guard);
        const double cur_probe = cur.front()[0];
        const bool done = std::abs(cur_probe - probe) < opt.refine.tol;
        nodes = std::move(cur);
        probe = cur_probe;
        used_sub = sub;
        if (done) break;
    }

    NPlayerDecoupling dec;
    dec.grid = grid;
    dec.spec = spec;
    dec.N = N;
    dec.kind = GameKind::nash;
    dec.substeps = used_sub;
    dec.has_symmetric = true;
    dec.sym.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        dec.sym.a[k] = nodes[k][0];
        dec.sym.b[k] = nodes[k][1];
        dec.sym.c[k] = nodes[k][2];
        dec.sym.d[k] = nodes[k][3];
        dec.sym.e[k] = nodes[k][4];
        dec.sym.f[k] = nodes[k][5];
        dec.sym.g[k] = nodes[k][6];
    }
    return dec;
}

/// Dense oracle solver: propagates the full affine map Y-stack = P X-stack + q
/// backward through the linear driver and the optimality-eliminated forward
/// drift without assuming exchangeability of the representation.
inline NPlayerDecoupling solve_nplayer_lq_dense(const LqSpec& spec, int N, const TimeGrid& grid,
                                                const NPlayerSolveOptions& opt = {}) {
    spec.validate_for_nplayer(N);
    if (N > opt.dense_limit)
        throw DenseLimitExceeded("solve_nplayer_lq_dense: N=" + std::to_string(N) +
                                 " exceeds dense limit " + std::to_string(opt.dense_limit));
    using detail::DenseState;
    auto rhs = [&spec, N](double, const DenseState& st) { return detail::nash_dense_rhs(spec, N, st); };
    auto guard = [&opt](const DenseState& st) {
        if (!st.p.allFinite() || st.p.cwiseAbs().maxCoeff() > opt.coeff_bound)
            throw RiccatiBlowup("solve_nplayer_lq_dense: affine map left magnitude bound");
    };

    DenseState terminal;
    terminal.p = Eigen::MatrixXd::Constant(N * N, N, 2.0 * spec.QbarT / (static_cast<double>(N) * N));
    for (int i = 0; i < N; ++i) terminal.p(i * N + i, i) += 2.0 * spec.QT;
    terminal.q = Eigen::VectorXd::Zero(N * N);

    std::vector<DenseState> nodes = integrate_backward_nodes(rhs, grid, terminal, 1, guard);
    int used_sub = 1;
    double probe = nodes.front().p(0, 0);
    for (int sub = 2; sub <= opt.refine.max_substeps; sub *= 2) {
        auto cur = integrate_backward_nodes(rhs, grid, terminal, sub, guard);
        const double cur_probe = cur.front().p(0, 0);
        const bool done = std::abs(cur_probe - probe) < opt.refine.tol;
        nodes = std::move(cur);
        probe = cur_probe;
        used_sub = sub;
        if (done) break;
    }

    NPlayerDecoupling dec;
    dec.grid = grid;
    dec.spec = spec;
    dec.N = N;
    dec.kind = GameKind::nash;
    dec.substeps = used_sub;
    dec.has_dense = true;
    dec.dense_p.reserve(nodes.size());
    dec.dense_q.reserve(nodes.size());
    for (auto& st : nodes) {
        dec.dense_p.push_back(std::move(st.p));
        dec.dense_q.push_back(std::move(st.q));
    }
    return dec;
}

}  // namespace mfglab::lq
