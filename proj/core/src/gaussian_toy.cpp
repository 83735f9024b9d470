#include "jkp/gaussian_toy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jkp {

namespace {

double two_sided(double p) {
    return 2.0 * std::min(p, 1.0 - p);
}

double predictive_sd(std::size_t n) {
    return std::sqrt(1.0 + 1.0 / static_cast<double>(n));
}

void check_sample(const GaussianToySample& sample) {
    if (sample.n == 0) throw std::invalid_argument("toy sample needs n >= 1");
}

std::vector<CurvePoint> curve_on(double center, double sd, std::size_t points, double (*fn)(const GaussianToySample&, double),
                                 const GaussianToySample& sample) {
    std::vector<double> ys;
    for (std::size_t k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(points - 1);
        ys.push_back(center - 4.0 * sd + t * 8.0 * sd);
    }
    ys.push_back(center);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::vector<CurvePoint> out;
    for (double y : ys) out.push_back({y, fn(sample, y)});
    return out;
}

}  // namespace

GaussianToySample GaussianToySample::draw(double theta, std::size_t n, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("toy sample needs n >= 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += theta + rng.normal();
    return {sum / static_cast<double>(n), n};
}

double confidence_cdf(const GaussianToySample& sample, double theta) {
    check_sample(sample);
    return normal_cdf(std::sqrt(static_cast<double>(sample.n)) * (theta - sample.ybar));
}

double confidence_curve(const GaussianToySample& sample, double theta) {
    return two_sided(confidence_cdf(sample, theta));
}

double predictive_cdf_toy(const GaussianToySample& sample, double y) {
    check_sample(sample);
    return normal_cdf((y - sample.ybar) / predictive_sd(sample.n));
}

double predictive_curve_toy(const GaussianToySample& sample, double y) {
    return two_sided(predictive_cdf_toy(sample, y));
}

std::pair<double, double> confidence_level_set(const GaussianToySample& sample, double alpha) {
    check_sample(sample);
    const double half = normal_quantile(1.0 - alpha / 2.0) / std::sqrt(static_cast<double>(sample.n));
    return {sample.ybar - half, sample.ybar + half};
}

std::pair<double, double> predictive_level_set(const GaussianToySample& sample, double alpha) {
    check_sample(sample);
    const double half = normal_quantile(1.0 - alpha / 2.0) * predictive_sd(sample.n);
    return {sample.ybar - half, sample.ybar + half};
}

ToyCurves toy_curves(const GaussianToySample& sample, std::size_t points) {
    check_sample(sample);
    if (points < 2) throw std::invalid_argument("curve grid needs at least 2 points");
    const double conf_sd = 1.0 / std::sqrt(static_cast<double>(sample.n));
    return {curve_on(sample.ybar, conf_sd, points, &confidence_curve, sample),
            curve_on(sample.ybar, predictive_sd(sample.n), points, &predictive_curve_toy, sample)};
}

}  // namespace jkp
