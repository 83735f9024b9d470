#include "jkp/conformal.hpp"

#include "jkp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jkp {

SubFitError::SubFitError(std::size_t omitted, const std::string& what)
    : std::runtime_error("leave-one-out fit without observation " + std::to_string(omitted) + " failed: " + what),
      omitted_(omitted) {}

LooEnsemble::LooEnsemble(std::vector<std::shared_ptr<const FittedModel>> models, Vector loo_residuals,
                         std::size_t dim)
    : models_(std::move(models)), residuals_(std::move(loo_residuals)), dim_(dim) {
    if (static_cast<Eigen::Index>(models_.size()) != residuals_.size()) {
        throw std::invalid_argument("one residual per leave-one-out model required");
    }
}

LooEnsemble build_loo_ensemble(const Dataset& data, const Learner& learner, const RngStream& rng,
                               unsigned threads) {
    const std::size_t n = data.size();
    if (n < 3) throw std::invalid_argument("conformal prediction needs at least 3 observations");

    std::vector<std::shared_ptr<const FittedModel>> models(n);
    Vector residuals(static_cast<Eigen::Index>(n));
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream fit_rng = rng.split(i);
        try {
            models[i] = learner.fit(data.without(i), fit_rng);
            const auto idx = static_cast<Eigen::Index>(i);
            residuals(idx) = data.y()(idx) - models[i]->predict(data.row(i));
        } catch (const std::exception& e) {
            throw SubFitError(i, e.what());
        }
    });
    return LooEnsemble(std::move(models), std::move(residuals), data.dim());
}

PredictiveResult::PredictiveResult(Vector scores, Vector x_new)
    : scores_(std::move(scores)), x_new_(std::move(x_new)), sorted_(scores_.data(), scores_.data() + scores_.size()) {
    if (sorted_.empty()) throw NumericError("empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double PredictiveResult::cdf(double y) const {
    const auto at_or_below = std::upper_bound(sorted_.begin(), sorted_.end(), y) - sorted_.begin();
    return static_cast<double>(at_or_below) / static_cast<double>(sorted_.size());
}

double PredictiveResult::curve(double y) const {
    const double q = cdf(y);
    return 2.0 * std::min(q, 1.0 - q);
}

PredictiveInterval PredictiveResult::interval(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const auto lo = quantile_rank(sorted_.size(), alpha / 2.0);
    const auto hi = quantile_rank(sorted_.size(), 1.0 - alpha / 2.0);
    return {sorted_[lo.k - 1], sorted_[hi.k - 1], alpha, lo.clamped || hi.clamped};
}

double PredictiveResult::median() const {
    return sorted_quantile(sorted_, 0.5);
}

std::vector<CurvePoint> PredictiveResult::grid(std::size_t points) const {
    if (points < 2) throw std::invalid_argument("curve grid needs at least 2 points");
    const double smin = sorted_.front();
    const double smax = sorted_.back();
    const double range = smax - smin;
    const double pad = range > 0.0 ? 0.1 * range : 0.5;
    const double lo = smin - pad;
    const double hi = smax + pad;

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < sorted_.size(); ++i) {
        const double gap = sorted_[i] - sorted_[i - 1];
        if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
    const double scale = std::max({1.0, std::abs(smin), std::abs(smax)});
    const double eps = std::min(1e-9 * scale, 0.25 * min_gap);

    std::vector<double> ys;
    ys.reserve(points + 2 * sorted_.size());
    for (std::size_t k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(points - 1);
        ys.push_back(k + 1 == points ? hi : lo + t * (hi - lo));
    }
    for (double s : sorted_) {
        ys.push_back(s - eps);
        ys.push_back(s + eps);
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<CurvePoint> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back({y, curve(y)});
    return out;
}

PredictiveResult conformal_scores(const LooEnsemble& ensemble, const Vector& x_new) {
    if (static_cast<std::size_t>(x_new.size()) != ensemble.dim()) {
        throw std::invalid_argument("test covariate dimension mismatch");
    }
    Vector scores(static_cast<Eigen::Index>(ensemble.size()));
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        scores(idx) = ensemble.model(i).predict(x_new) + ensemble.loo_residuals()(idx);
    }
    return PredictiveResult(std::move(scores), x_new);
}

double predictive_cdf(const PredictiveResult& result, double y) {
    return result.cdf(y);
}

double predictive_curve(const PredictiveResult& result, double y) {
    return result.curve(y);
}

PredictiveInterval predictive_interval(const PredictiveResult& result, double alpha) {
    return result.interval(alpha);
}

double median_point_prediction(const PredictiveResult& result) {
    return result.median();
}

std::vector<CurvePoint> curve_grid(const PredictiveResult& result, std::size_t points) {
    return result.grid(points);
}

}  // namespace jkp
