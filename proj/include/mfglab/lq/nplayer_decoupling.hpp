#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfglab/grid.hpp"
#include "mfglab/lq/spec.hpp"

namespace mfglab::lq {

enum class GameKind { nash, social };

/// Node-sampled scalar families of the exchangeable ansatz
///   Y^{i,i} = a X^i + b Xbar + c
///   Y^{i,j} = (d X^i + e X^j + f Xbar + g) / N   (i != j).
/// The social system carries one adjoint per player (Y^i); it is stored in
/// (a, b, c) with the off-diagonal families identically zero.
struct SymmetricCoeffs {
    std::vector<double> a, b, c, d, e, f, g;

    void resize(std::size_t nodes) {
        a.assign(nodes, 0.0);
        b.assign(nodes, 0.0);
        c.assign(nodes, 0.0);
        d.assign(nodes, 0.0);
        e.assign(nodes, 0.0);
        f.assign(nodes, 0.0);
        g.assign(nodes, 0.0);
    }
};

/// Affine representation of the adjoint family Y^{i,j}_t over the grid, in
/// one or both of two interchangeable encodings:
///  - dense: per-node matrix P (rows indexed by the pair (i,j), columns by
///    the state index) and offset vector q, with Y-stack = P X-stack + q;
///  - symmetric: the scalar families above.
/// Z is recovered as the sigma-weighted state gradient of the affine map.
struct NPlayerDecoupling {
    TimeGrid grid;
    LqSpec spec;
    int N = 0;
    GameKind kind = GameKind::nash;
    int substeps = 1;

    bool has_symmetric = false;
    SymmetricCoeffs sym;

    bool has_dense = false;
    std::vector<Eigen::MatrixXd> dense_p;  // (N*N) x N for nash, N x N for social
    std::vector<Eigen::VectorXd> dense_q;

    int row_of(int i, int j) const { return kind == GameKind::nash ? i * N + j : i; }

    /// Assembled coefficient of Y^{i,j} on X^l at a grid node.
    double y_coef(int node, int i, int j, int l) const {
        if (has_dense) {
            if (kind == GameKind::social && i != j) return 0.0;
            return dense_p[static_cast<std::size_t>(node)](row_of(i, j), l);
        }
        const auto k = static_cast<std::size_t>(node);
        const double invN = 1.0 / N;
        if (i == j)
            return (l == i ? sym.a[k] : 0.0) + sym.b[k] * invN;
        return ((l == i ? sym.d[k] : 0.0) + (l == j ? sym.e[k] : 0.0) + sym.f[k] * invN) * invN;
    }

    double y_offset(int node, int i, int j) const {
        if (has_dense) {
            if (kind == GameKind::social && i != j) return 0.0;
            return dense_q[static_cast<std::size_t>(node)](row_of(i, j));
        }
        const auto k = static_cast<std::size_t>(node);
        if (i == j) return sym.c[k];
        return sym.g[k] / N;
    }

    /// Y^{i,j} evaluated on a state vector (uses the symmetric encoding when
    /// available; otherwise the dense row).
    double y_entry(int node, int i, int j, const Eigen::VectorXd& x) const {
        if (has_symmetric) {
            const auto k = static_cast<std::size_t>(node);
            const double xbar = x.mean();
            if (i == j) return sym.a[k] * x(i) + sym.b[k] * xbar + sym.c[k];
            if (kind == GameKind::social) return 0.0;
            return (sym.d[k] * x(i) + sym.e[k] * x(j) + sym.f[k] * xbar + sym.g[k]) / N;
        }
        if (kind == GameKind::social && i != j) return 0.0;
        return dense_p[static_cast<std::size_t>(node)].row(row_of(i, j)).dot(x) +
               dense_q[static_cast<std::size_t>(node)](row_of(i, j));
    }

    double z_entry(int node, int i, int j, int k_noise) const {
        return spec.sigma * y_coef(node, i, j, k_noise);
    }
};

/// Aggregate coefficient views of the symmetric encoding at one node; every
/// aggregate is an affine function alpha*X^i + beta*Xbar + gamma.
struct SymmetricAggregates {
    // row mean  Ybar^{i,.} = (1/N) sum_j Y^{i,j}
    double row_i, row_x, row_c;
    // diagonal mean (1/N) sum_i Y^{i,i} : (a+b) Xbar + c
    double diag_x, diag_c;
    // grand mean (1/N^2) sum_{i,j} Y^{i,j}
    double grand_x, grand_c;
};

inline SymmetricAggregates symmetric_aggregates(const SymmetricCoeffs& s, std::size_t k, int N) {
    SymmetricAggregates out{};
    const double a = s.a[k], b = s.b[k], c = s.c[k];
    const double d = s.d[k], e = s.e[k], f = s.f[k], g = s.g[k];
    const double nm1 = static_cast<double>(N - 1);
    out.row_i = (a + (d * nm1 - e) / N) / N;
    out.row_x = (b + e + f * nm1 / N) / N;
    out.row_c = (c + g * nm1 / N) / N;
    out.diag_x = a + b;
    out.diag_c = c;
    out.grand_x = ((a + b) + (d + e + f) * nm1 / N) / N;
    out.grand_c = (c + g * nm1 / N) / N;
    return out;
}

}  // namespace mfglab::lq
