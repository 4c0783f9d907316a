#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/grid.hpp"
#include "mfglab/lq/nplayer_decoupling.hpp"
#include "mfglab/lq/spec.hpp"
#include "mfglab/ode.hpp"

namespace mfglab::lq {

/// Exchangeable linear FBSDE with one adjoint per particle and empirical-mean
/// interaction (no 1/N-weighted self terms):
///   dX^i = (p1 X^i + p2 Xbar + p3 Y^i + p4 Ybar) dt + sigma dW^i
///   dY^i = -(q1 X^i + q2 Xbar + q3 Y^i + q4 Ybar) dt + sum_k Z^{i,k} dW^k
///   Y^i_T = r1 X^i_T + r2 Xbar_T.
/// Both the cooperative N-player adjoint system and the finite-dimensional
/// value system approximating the master equation have this shape; their
/// decoupling families (a, b, c) are N-free because no coefficient carries N.
struct MeanFieldLinearFbsde {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
    double q1 = 0, q2 = 0, q3 = 0, q4 = 0;
    double r1 = 0, r2 = 0;
};

/// Cooperative (social) N-player adjoint system in LQ coordinates. The
/// optimality terms carry no 1/N factors, so the drift/driver coefficients
/// coincide with the MKV control system's.
inline MeanFieldLinearFbsde social_system(const LqSpec& s) {
    s.validate_for_cooperative();
    MeanFieldLinearFbsde m;
    const double rr = s.R + s.Rbar;
    const double sb = s.Sbar * (s.B + s.Bbar) / (2.0 * rr);
    m.p1 = s.A;
    m.p2 = s.Abar - sb;
    m.p3 = -s.B * s.B / (2.0 * s.R);
    m.p4 = (s.B * s.B * s.Rbar - 2.0 * s.B * s.Bbar * s.R - s.Bbar * s.Bbar * s.R) /
           (2.0 * s.R * rr);
    m.q1 = 2.0 * s.Q;
    m.q2 = 2.0 * s.Qbar - s.Sbar * s.Sbar / (2.0 * rr);
    m.q3 = s.A;
    m.q4 = s.Abar - sb;
    m.r1 = 2.0 * s.QT;
    m.r2 = 2.0 * s.QbarT;
    return m;
}

/// N-particle value system for the master-equation approximation: the MFG
/// limit FBSDE with the law replaced by the empirical measure of the
/// particles.
inline MeanFieldLinearFbsde master_value_system(const LqSpec& s) {
    s.validate();
    MeanFieldLinearFbsde m;
    m.p1 = s.A;
    m.p2 = s.Abar;
    m.p3 = -s.B * s.B / (2.0 * s.R);
    m.p4 = -s.B * s.Bbar / (2.0 * s.R);
    m.q1 = 2.0 * s.Q;
    m.q2 = 0.0;
    m.q3 = s.A;
    m.q4 = -s.Sbar * s.B / (2.0 * s.R);
    m.r1 = 2.0 * s.QT;
    m.r2 = 0.0;
    return m;
}

namespace detail {

inline Eigen::Vector3d meanfield_symmetric_rhs(const MeanFieldLinearFbsde& s,
                                               const Eigen::Vector3d& v) {
    const double a = v[0], b = v[1], c = v[2];
    const double ab = a + b;
    Eigen::Vector3d out;
    out[0] = -a * (s.p1 + s.p3 * a) - (s.q1 + s.q3 * a);
    out[1] = -(a * (s.p2 + s.p3 * b + s.p4 * ab) + b * (s.p1 + s.p2 + (s.p3 + s.p4) * ab)) -
             (s.q2 + s.q3 * b + s.q4 * ab);
    out[2] = -ab * (s.p3 + s.p4) * c - (s.q3 + s.q4) * c;
    return out;
}

struct MeanFieldDenseState {
    Eigen::MatrixXd p;  // N x N
    Eigen::VectorXd q;  // N

    MeanFieldDenseState operator+(const MeanFieldDenseState& o) const { return {p + o.p, q + o.q}; }
    friend MeanFieldDenseState operator*(double s, const MeanFieldDenseState& st) {
        return {s * st.p, s * st.q};
    }
};

inline MeanFieldDenseState meanfield_dense_rhs(const MeanFieldLinearFbsde& s, int N,
                                               const MeanFieldDenseState& st) {
    const Eigen::MatrixXd& p = st.p;
    const Eigen::RowVectorXd col_mean = p.colwise().mean();
    const double q_mean = st.q.mean();
    const Eigen::RowVectorXd unit_mean = Eigen::RowVectorXd::Constant(N, 1.0 / N);

    Eigen::MatrixXd drift = s.p3 * p;
    Eigen::VectorXd drift_c = s.p3 * st.q;
    Eigen::MatrixXd drv = s.q3 * p;
    Eigen::VectorXd drv_c = s.q3 * st.q;
    for (int i = 0; i < N; ++i) {
        drift.row(i) += s.p2 * unit_mean + s.p4 * col_mean;
        drift(i, i) += s.p1;
        drift_c(i) += s.p4 * q_mean;
        drv.row(i) += s.q2 * unit_mean + s.q4 * col_mean;
        drv(i, i) += s.q1;
        drv_c(i) += s.q4 * q_mean;
    }
    MeanFieldDenseState out;
    out.p = -(p * drift + drv);
    out.q = -(p * drift_c + drv_c);
    return out;
}

}  // namespace detail

/// Scalar decoupling Y^i = a X^i + b Xbar + c of a MeanFieldLinearFbsde.
struct MeanFieldDecoupling {
    TimeGrid grid;
    MeanFieldLinearFbsde system;
    std::vector<double> a, b, c;
    int substeps = 1;

    double value(int node, double x_i, double xbar) const {
        const auto k = static_cast<std::size_t>(node);
        return a[k] * x_i + b[k] * xbar + c[k];
    }
};

inline MeanFieldDecoupling solve_meanfield_symmetric(const MeanFieldLinearFbsde& sys,
                                                     const TimeGrid& grid,
                                                     double coeff_bound = 1e6,
                                                     const OdeRefinement& refine = {}) {
    using Vec3 = Eigen::Vector3d;
    auto rhs = [&sys](double, const Vec3& v) { return detail::meanfield_symmetric_rhs(sys, v); };
    auto guard = [coeff_bound](const Vec3& v) {
        if (!v.allFinite() || v.cwiseAbs().maxCoeff() > coeff_bound)
            throw RiccatiBlowup("solve_meanfield_symmetric: coefficient left magnitude bound");
    };
    const Vec3 terminal(sys.r1, sys.r2, 0.0);
    std::vector<Vec3> nodes = integrate_backward_nodes(rhs, grid, terminal, 1, guard);
    int used_sub = 1;
    double probe = nodes.front()[0] + nodes.front()[1];
    for (int sub = 2; sub <= refine.max_substeps; sub *= 2) {
        auto cur = integrate_backward_nodes(rhs, grid, terminal, sub, guard);
        const double cur_probe = cur.front()[0] + cur.front()[1];
        const bool done = std::abs(cur_probe - probe) < refine.tol;
        nodes = std::move(cur);
        probe = cur_probe;
        used_sub = sub;
        if (done) break;
    }
    MeanFieldDecoupling dec;
    dec.grid = grid;
    dec.system = sys;
    dec.substeps = used_sub;
    dec.a.resize(nodes.size());
    dec.b.resize(nodes.size());
    dec.c.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        dec.a[k] = nodes[k][0];
        dec.b[k] = nodes[k][1];
        dec.c[k] = nodes[k][2];
    }
    return dec;
}

/// Dense (N x N) counterpart used as an independent check of the scalar
/// ansatz for this system shape.
struct MeanFieldDenseDecoupling {
    TimeGrid grid;
    int N = 0;
    std::vector<Eigen::MatrixXd> p;
    std::vector<Eigen::VectorXd> q;
};

inline MeanFieldDenseDecoupling solve_meanfield_dense(const MeanFieldLinearFbsde& sys, int N,
                                                      const TimeGrid& grid,
                                                      double coeff_bound = 1e6,
                                                      const OdeRefinement& refine = {}) {
    using detail::MeanFieldDenseState;
    auto rhs = [&sys, N](double, const MeanFieldDenseState& st) {
        return detail::meanfield_dense_rhs(sys, N, st);
    };
    auto guard = [coeff_bound](const MeanFieldDenseState& st) {
        if (!st.p.allFinite() || st.p.cwiseAbs().maxCoeff() > coeff_bound)
            throw RiccatiBlowup("solve_meanfield_dense: affine map left magnitude bound");
    };
    MeanFieldDenseState terminal;
    terminal.p = Eigen::MatrixXd::Constant(N, N, sys.r2 / N);
    terminal.p.diagonal().array() += sys.r1;
    terminal.q = Eigen::VectorXd::Zero(N);

    std::vector<MeanFieldDenseState> nodes = integrate_backward_nodes(rhs, grid, terminal, 1, guard);
    int used_sub = 1;
    double probe = nodes.front().p(0, 0);
    for (int sub = 2; sub <= refine.max_substeps; sub *= 2) {
        auto cur = integrate_backward_nodes(rhs, grid, terminal, sub, guard);
        const double cur_probe = cur.front().p(0, 0);
        const bool done = std::abs(cur_probe - probe) < refine.tol;
        nodes = std::move(cur);
        probe = cur_probe;
        used_sub = sub;
        if (done) break;
    }
    MeanFieldDenseDecoupling dec;
    dec.grid = grid;
    dec.N = N;
    for (auto& st : nodes) {
        dec.p.push_back(std::move(st.p));
        dec.q.push_back(std::move(st.q));
    }
    (void)used_sub;
    return dec;
}

}  // namespace mfglab::lq
