#include <catch2/catch_amalgamated.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfglab/chaos/regression.hpp"

using namespace mfglab::chaos;

TEST_CASE("targets inside the basis span are recovered exactly") {
    const int n = 64;
    Eigen::VectorXd x(n), ylag(n);
    for (int i = 0; i < n; ++i) {
        x(i) = std::sin(0.37 * i) * 2.0;
        ylag(i) = std::cos(0.53 * i);
    }
    const Eigen::MatrixXd feats = polynomial_features({x, ylag}, 2);
    RidgeRegression reg(feats, 1e-12);
    const Eigen::VectorXd target =
        0.7 * Eigen::VectorXd::Ones(n) - 1.3 * x + 0.25 * x.cwiseProduct(ylag);
    const Eigen::VectorXd fit = reg.fitted(target);
    CHECK((fit - target).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("indicator basis reproduces exact conditional expectations") {
    // Brute-force check over a 2-point-increment discrete noise model:
    // 4 particles, increments +/-1 with equal weight, enumerated jointly.
    // The regression sample holds every outcome of (state, target) with equal
    // weight; projecting the target on per-state indicator columns must equal
    // the enumerated conditional expectation E[target | state].
    const int n_states = 3;
    std::vector<double> levels = {-1.0, 0.0, 1.0};
    // every (state, increment) pair appears once => 6 sample rows
    std::vector<double> state, target;
    for (int si = 0; si < n_states; ++si) {
        for (double eps : {-1.0, 1.0}) {
            state.push_back(levels[static_cast<std::size_t>(si)]);
            // target = V(state + eps) for a nonlinear V
            const double xn = levels[static_cast<std::size_t>(si)] + eps;
            target.push_back(xn * xn * xn + 0.5 * xn);
        }
    }
    const auto rows = static_cast<Eigen::Index>(state.size());
    Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(rows, n_states);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (int si = 0; si < n_states; ++si)
            if (state[static_cast<std::size_t>(r)] == levels[static_cast<std::size_t>(si)])
                feats(r, si) = 1.0;
    Eigen::VectorXd tgt(rows);
    for (Eigen::Index r = 0; r < rows; ++r) tgt(r) = target[static_cast<std::size_t>(r)];

    RidgeRegression reg(feats, 1e-14);
    const Eigen::VectorXd fit = reg.fitted(tgt);
    // enumerated conditional expectations
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double x0 = state[static_cast<std::size_t>(r)];
        double ce = 0.0;
        for (double eps : {-1.0, 1.0}) {
            const double xn = x0 + eps;
            ce += 0.5 * (xn * xn * xn + 0.5 * xn);
        }
        CAPTURE(r);
        REQUIRE(fit(r) == Catch::Approx(ce).margin(1e-9));
    }
}

TEST_CASE("ridge keeps collinear designs solvable") {
    const int n = 32;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 0.1 * i;
    const Eigen::VectorXd copy = x;  // perfectly collinear second column
    Eigen::MatrixXd feats(n, 3);
    feats.col(0).setOnes();
    feats.col(1) = x;
    feats.col(2) = copy;
    RidgeRegression reg(feats, 1e-10);
    const Eigen::VectorXd fit = reg.fitted(2.0 * x);
    CHECK((fit - 2.0 * x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("degree validation") {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(polynomial_features({x}, 3), mfglab::ConfigError);
}
