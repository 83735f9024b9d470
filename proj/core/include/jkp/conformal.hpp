#pragma once

#include "jkp/dataset.hpp"
#include "jkp/learners.hpp"
#include "jkp/numeric.hpp"
#include "jkp/rng.hpp"

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace jkp {

/// Raised when a leave-one-out sub-fit fails; names the omitted index.
class SubFitError : public std::runtime_error {
public:
    SubFitError(std::size_t omitted, const std::string& what);
    std::size_t omitted_index() const { return omitted_; }

private:
    std::size_t omitted_;
};

/// n leave-one-out fits of a learner and their residuals.
///
/// The fit that leaves out observation i (and the test point) is the same
/// for every test point, so the ensemble is built once per dataset and
/// reused for all predictions.
class LooEnsemble {
public:
    LooEnsemble(std::vector<std::shared_ptr<const FittedModel>> models, Vector loo_residuals, std::size_t dim);

    std::size_t size() const { return models_.size(); }
    std::size_t dim() const { return dim_; }
    const FittedModel& model(std::size_t i) const { return *models_.at(i); }
    /// R_i = y_i - (prediction at x_i from the fit without i).
    const Vector& loo_residuals() const { return residuals_; }

private:
    std::vector<std::shared_ptr<const FittedModel>> models_;
    Vector residuals_;
    std::size_t dim_;
};

/// Fit i uses rng.split(i). With threads > 1 the fits run concurrently;
/// results do not depend on the thread count.
LooEnsemble build_loo_ensemble(const Dataset& data, const Learner& learner, const RngStream& rng,
                               unsigned threads = 1);

struct PredictiveInterval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.0;
    bool clamped = false;

    double width() const { return upper - lower; }
    bool contains(double y) const { return lower <= y && y <= upper; }
    /// Finite-sample guaranteed coverage under exchangeability.
    double guaranteed_level() const { return 1.0 - 2.0 * alpha; }
    /// Typical (nominal) coverage.
    double nominal_level() const { return 1.0 - alpha; }
};

struct CurvePoint {
    double y;
    double pv;
};

/// Conformal scores s_i at a test covariate with their step functions.
class PredictiveResult {
public:
    PredictiveResult(Vector scores, Vector x_new);

    const Vector& scores() const { return scores_; }
    const std::vector<double>& sorted_scores() const { return sorted_; }
    const Vector& x_new() const { return x_new_; }
    std::size_t size() const { return sorted_.size(); }

    /// Q_n(y) = #{i : y >= s_i} / n.
    double cdf(double y) const;
    /// PV_n(y) = 2 min(Q_n(y), 1 - Q_n(y)).
    double curve(double y) const;
    PredictiveInterval interval(double alpha) const;
    /// Left end of the PV_n maximizer region: the ceil(n/2)-th order statistic.
    double median() const;
    std::vector<CurvePoint> grid(std::size_t points) const;

private:
    Vector scores_;
    Vector x_new_;
    std::vector<double> sorted_;
};

/// s_i = model_i(x_new) + R_i.
PredictiveResult conformal_scores(const LooEnsemble& ensemble, const Vector& x_new);

double predictive_cdf(const PredictiveResult& result, double y);
double predictive_curve(const PredictiveResult& result, double y);
/// [q_{alpha/2}(s), q_{1-alpha/2}(s)] under the ceil(alpha n) order-statistic rule.
PredictiveInterval predictive_interval(const PredictiveResult& result, double alpha);
double median_point_prediction(const PredictiveResult& result);

/// `points` equally spaced values over [min s - 0.1 r, max s + 0.1 r]
/// (r = score range), merged with s_i -/+ eps around every score so each
/// step of PV_n is visible. Strictly increasing in y.
std::vector<CurvePoint> curve_grid(const PredictiveResult& result, std::size_t points);

}  // namespace jkp
