#pragma once

#include "jkp/conformal.hpp"
#include "jkp/rng.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace jkp {

/// y_1..y_n iid N(theta, 1), summarized by its mean.
struct GaussianToySample {
    double ybar = 0.0;
    std::size_t n = 1;

    static GaussianToySample draw(double theta, std::size_t n, RngStream& rng);
};

/// H_n(theta) = Phi(sqrt(n) (theta - ybar)).
double confidence_cdf(const GaussianToySample& sample, double theta);
/// CV_n(theta) = 2 min(H_n, 1 - H_n).
double confidence_curve(const GaussianToySample& sample, double theta);
/// Q_n(y) = Phi((y - ybar) / sqrt(1 + 1/n)).
double predictive_cdf_toy(const GaussianToySample& sample, double y);
/// PV_n(y) = 2 min(Q_n, 1 - Q_n).
double predictive_curve_toy(const GaussianToySample& sample, double y);

/// {theta : CV_n(theta) >= alpha} = ybar -/+ Phi^{-1}(1 - alpha/2) / sqrt(n).
std::pair<double, double> confidence_level_set(const GaussianToySample& sample, double alpha);
/// {y : PV_n(y) >= alpha} = ybar -/+ Phi^{-1}(1 - alpha/2) sqrt(1 + 1/n).
std::pair<double, double> predictive_level_set(const GaussianToySample& sample, double alpha);

struct ToyCurves {
    std::vector<CurvePoint> confidence;  // (theta, CV_n)
    std::vector<CurvePoint> predictive;  // (y, PV_n)
};

/// Both curves on `points` equally spaced values spanning ybar -/+ 4 sd of
/// the respective distribution, with ybar itself added so the peak is exact.
ToyCurves toy_curves(const GaussianToySample& sample, std::size_t points);

}  // namespace jkp
