#pragma once

#include <Eigen/Dense>
#include <span>

namespace mfglab::chaos {

/// Measure argument handed to coefficient callables: a weighted empirical
/// sample of (X, Y) pairs with its first moments precomputed. Frozen law
/// flows and co-particle clouds both back this view.
struct MeasureView {
    std::span<const double> xs;
    std::span<const double> ys;
    double mean_x = 0.0;
    double mean_y = 0.0;

    static MeasureView of(std::span<const double> xs, std::span<const double> ys) {
        MeasureView v;
        v.xs = xs;
        v.ys = ys;
        double sx = 0.0, sy = 0.0;
        for (double x : xs) sx += x;
        for (double y : ys) sy += y;
        if (!xs.empty()) v.mean_x = sx / static_cast<double>(xs.size());
        if (!ys.empty()) v.mean_y = sy / static_cast<double>(ys.size());
        return v;
    }

    static MeasureView moments(double mean_x, double mean_y) {
        MeasureView v;
        v.mean_x = mean_x;
        v.mean_y = mean_y;
        return v;
    }
};

}  // namespace mfglab::chaos
