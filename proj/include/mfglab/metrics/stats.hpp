#pragma once

#include <cmath>
#include <vector>

#include "mfglab/errors.hpp"

namespace mfglab::metrics {

/// Least-squares fit of log(value) against log(N).
struct SlopeFit {
    std::vector<double> log_n;
    std::vector<double> log_value;
    std::vector<double> point_halfwidth;  // CI half-widths in log space (may be empty)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;  // always reported, never hidden
    double slope_stderr = 0.0;
};

/// Fit log(value) = slope*log(N) + intercept. Requires >= 4 points and
/// strictly positive values; `halfwidths` (if given) are CI half-widths of
/// the values, carried into log space for reporting.
inline SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points,
                             const std::vector<double>& halfwidths = {}) {
    if (points.size() < 4)
        throw InsufficientData("loglog_slope: need at least 4 points");
    if (!halfwidths.empty() && halfwidths.size() != points.size())
        throw ConfigError("loglog_slope: halfwidth count mismatch");
    SlopeFit fit;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
            throw InsufficientData("loglog_slope: nonpositive point");
        fit.log_n.push_back(std::log(points[i].first));
        fit.log_value.push_back(std::log(points[i].second));
        if (!halfwidths.empty()) {
            // relative half-width maps to an additive band in log space
            const double rel = halfwidths[i] / points[i].second;
            fit.point_halfwidth.push_back(std::log1p(rel));
        }
    }
    const std::size_t n = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += fit.log_n[i];
        sy += fit.log_value[i];
        sxx += fit.log_n[i] * fit.log_n[i];
        sxy += fit.log_n[i] * fit.log_value[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw InsufficientData("loglog_slope: degenerate abscissae");
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.slope * fit.log_n[i] + fit.intercept;
        ss_res += (fit.log_value[i] - pred) * (fit.log_value[i] - pred);
        ss_tot += (fit.log_value[i] - ybar) * (fit.log_value[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (n > 2) {
        const double sigma2 = ss_res / (n - 2);
        fit.slope_stderr = std::sqrt(sigma2 * n / den);
    }
    return fit;
}

/// Binomial tail estimate with a Wilson 95% interval.
struct TailEstimate {
    double estimate = 0.0;  // raw k/n
    double lower = 0.0;
    double upper = 0.0;
    long count = 0;
    long n = 0;
};

inline TailEstimate wilson_interval(long count, long n, double z = 1.959963984540054) {
    if (n <= 0) throw EmptySample("wilson_interval: empty sample");
    TailEstimate t;
    t.count = count;
    t.n = n;
    const double phat = static_cast<double>(count) / n;
    t.estimate = phat;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    t.lower = count == 0 ? 0.0 : std::max(0.0, center - half);
    t.upper = count == n ? 1.0 : std::min(1.0, center + half);
    return t;
}

/// P(sample >= threshold) with Wilson interval.
inline TailEstimate empirical_tail(const std::vector<double>& samples, double threshold) {
    if (samples.empty()) throw EmptySample("empirical_tail: empty sample");
    long count = 0;
    for (double s : samples)
        if (s >= threshold) ++count;
    return wilson_interval(count, static_cast<long>(samples.size()));
}

}  // namespace mfglab::metrics
