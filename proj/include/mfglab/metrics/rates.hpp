#pragma once

#include <cmath>
#include <string>

#include "mfglab/errors.hpp"

namespace mfglab::metrics {

/// Query for the convergence-rate table r_{N,M,k,p}.
struct RateQuery {
    long N = 1;      // number of particles / players
    double M = 1;    // dimension parameter
    double k = 8;    // moment order, must exceed p
    double p = 2;    // power (defaults to the squared-distance case)
};

/// Piecewise rate
///   N^{-1/2}            + N^{-(k-p)/k}   if p > M/2 and k != 2p
///   N^{-1/2} log(1+N)   + N^{-(k-p)/k}   if p = M/2 and k != 2p
///   N^{-2/M}            + N^{-(k-p)/k}   if M > 2p and k != M/(M-p).
/// The boundary cases excluded above are not defined; they raise
/// UndefinedRegime rather than being interpolated.
inline double theoretical_rate(const RateQuery& q) {
    if (q.N < 1) throw ConfigError("theoretical_rate: N must be >= 1");
    if (!(q.M >= 1)) throw ConfigError("theoretical_rate: M must be >= 1");
    if (!(q.p > 0) || !(q.k > q.p))
        throw ConfigError("theoretical_rate: need k > p > 0");
    const double N = static_cast<double>(q.N);
    const double tail = std::pow(N, -(q.k - q.p) / q.k);
    if (q.p > q.M / 2) {
        if (q.k == 2 * q.p)
            throw UndefinedRegime("theoretical_rate: k = 2p excluded when p > M/2");
        return std::pow(N, -0.5) + tail;
    }
    if (q.p == q.M / 2) {
        if (q.k == 2 * q.p)
            throw UndefinedRegime("theoretical_rate: k = 2p excluded when p = M/2");
        return std::pow(N, -0.5) * std::log1p(N) + tail;
    }
    // here M > 2p
    if (q.k == q.M / (q.M - q.p))
        throw UndefinedRegime("theoretical_rate: k = M/(M-p) excluded when M > 2p");
    return std::pow(N, -2.0 / q.M) + tail;
}

/// r_{N,M,k} := r_{N,M,k,2}.
inline double theoretical_rate(long N, double M, double k) {
    return theoretical_rate(RateQuery{N, M, k, 2.0});
}

}  // namespace mfglab::metrics
