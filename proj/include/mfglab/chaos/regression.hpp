#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfglab/errors.hpp"

namespace mfglab::chaos {

/// Ridge-regularized least squares on precomputed features. One Gram
/// factorization serves any number of target vectors.
class RidgeRegression {
public:
    RidgeRegression(const Eigen::MatrixXd& features, double ridge) : features_(features) {
        Eigen::MatrixXd gram = features.transpose() * features;
        gram.diagonal().array() += ridge * static_cast<double>(features.rows());
        ldlt_.compute(gram);
        if (ldlt_.info() != Eigen::Success)
            throw RegressionSingular("RidgeRegression: Gram factorization failed");
    }

    Eigen::VectorXd coefficients(const Eigen::VectorXd& targets) const {
        Eigen::VectorXd beta = ldlt_.solve(features_.transpose() * targets);
        if (!beta.allFinite())
            throw RegressionSingular("RidgeRegression: normal equations rank-deficient "
                                     "beyond ridge tolerance");
        return beta;
    }

    Eigen::VectorXd fitted(const Eigen::VectorXd& targets) const {
        return features_ * coefficients(targets);
    }

private:
    Eigen::MatrixXd features_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

/// Symmetric-statistics polynomial basis: monomials of total degree <= degree
/// in the supplied per-particle statistics columns.
inline Eigen::MatrixXd polynomial_features(const std::vector<Eigen::VectorXd>& stats,
                                           int degree) {
    if (stats.empty()) throw ConfigError("polynomial_features: no statistics");
    const Eigen::Index n = stats.front().size();
    for (const auto& s : stats)
        if (s.size() != n) throw ConfigError("polynomial_features: ragged statistics");
    const std::size_t m = stats.size();
    std::size_t cols = 1 + m;
    if (degree >= 2) cols += m * (m + 1) / 2;
    if (degree > 2 || degree < 1)
        throw ConfigError("polynomial_features: degree must be 1 or 2");
    Eigen::MatrixXd f(n, static_cast<Eigen::Index>(cols));
    f.col(0).setOnes();
    for (std::size_t j = 0; j < m; ++j) f.col(1 + static_cast<Eigen::Index>(j)) = stats[j];
    if (degree >= 2) {
        Eigen::Index c = 1 + static_cast<Eigen::Index>(m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j; k < m; ++k)
                f.col(c++) = stats[j].cwiseProduct(stats[k]);
    }
    return f;
}

}  // namespace mfglab::chaos
