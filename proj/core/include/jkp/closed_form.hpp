#pragma once

#include "jkp/conformal.hpp"
#include "jkp/dataset.hpp"
#include "jkp/learners.hpp"
#include "jkp/numeric.hpp"
#include "jkp/rng.hpp"
#include "jkp/scenarios.hpp"

#include <cstddef>

namespace jkp {

/// Jackknife-plus scores of a least-squares learner without refitting:
/// s_i = x_new' b + (1 - h_{i,new}) u_i with deleted residuals
/// u_i = (y_i - x_i' b) / (1 - h_ii).
struct ClosedFormScores {
    Vector beta_hat;
    double point_prediction = 0.0;
    Vector leverages;          // h_ii (or g_ii)
    Vector deleted_residuals;  // u_i (or v_i)
    Vector leverage_cross;     // h_{i,new} (or g_{i,new})
    Vector scores;

    PredictiveResult result(const Vector& x_new) const { return PredictiveResult(scores, x_new); }
};

/// One factorization of the design, reused for every test point.
class ClosedFormJackknife {
public:
    /// Throws NumericError for rank-deficient designs or leverage-one points.
    ClosedFormJackknife(const Matrix& design, const Vector& y);

    const Vector& beta_hat() const { return beta_; }
    const Vector& leverages() const { return ls_.leverages(); }
    const Vector& deleted_residuals() const { return deleted_; }

    /// `design_row` is the test point in design coordinates.
    ClosedFormScores scores_at(const Vector& design_row) const;

private:
    LeastSquares ls_;
    Vector beta_;
    Vector deleted_;
};

/// X and x_new in design coordinates (intercept column included by the caller).
ClosedFormScores closed_form_scores(const Matrix& X, const Vector& y, const Vector& x_new);

/// Same computation for the working submodel with design Z.
ClosedFormScores closed_form_scores_submodel(const Matrix& Z, const Vector& y, const Vector& z_new);

/// Feature-map convenience: expands the raw covariates first.
ClosedFormScores closed_form_scores(const FeatureMap& map, const Dataset& data, const Vector& x_new);

/// Bias of the submodel predictor and the expected shift of its residual
/// terms, for a known coefficient vector.
struct HomeostasisReport {
    double bias = 0.0;
    Vector shifts;
    double average_shift = 0.0;
    double cancellation_gap = 0.0;  // bias + average_shift
    Matrix w_perp;                  // (I - Z (Z'Z)^{-1} Z') W
};

/// Design partition X = (Z, W); `beta` is the full coefficient vector whose
/// trailing W.cols() entries multiply W; x_new = (z_new, w_new) in design
/// coordinates.
///   bias     = -w_new' b2 + z_new' (Z'Z)^{-1} Z' W b2
///   shift_i  = (1 - g_{i,new}) / (1 - g_ii) * (w_i^perp)' b2
HomeostasisReport homeostasis_report(const Matrix& Z, const Matrix& W, const Vector& beta, const Vector& x_new);

struct WidthOrderingTrial {
    double width_true = 0.0;   // full model (intercept, z, w)
    double width_wrong = 0.0;  // submodel (intercept, z)
};

/// Draws n training rows from the linear scenario and returns both interval
/// widths at x_new = sample mean of the covariates (intercept coordinate 1).
WidthOrderingTrial width_ordering_trial(const LinearScenario& scenario, std::size_t n, double alpha,
                                        const RngStream& rng);

}  // namespace jkp
