#include "jkp/closed_form.hpp"

#include <stdexcept>

namespace jkp {

ClosedFormJackknife::ClosedFormJackknife(const Matrix& design, const Vector& y) : ls_(design) {
    if (y.size() != design.rows()) throw std::invalid_argument("response length does not match design rows");
    const Vector& h = ls_.leverages();
    if ((h.array() >= 1.0 - kLeverageTolerance).any()) throw NumericError("leverage-one point");
    beta_ = ls_.solve(y);
    deleted_ = ((y - design * beta_).array() / (1.0 - h.array())).matrix();
}

ClosedFormScores ClosedFormJackknife::scores_at(const Vector& design_row) const {
    ClosedFormScores out;
    out.beta_hat = beta_;
    out.point_prediction = design_row.dot(beta_);
    out.leverages = ls_.leverages();
    out.deleted_residuals = deleted_;
    out.leverage_cross = ls_.cross_leverages(design_row);
    out.scores = ((1.0 - out.leverage_cross.array()) * deleted_.array() + out.point_prediction).matrix();
    return out;
}

ClosedFormScores closed_form_scores(const Matrix& X, const Vector& y, const Vector& x_new) {
    return ClosedFormJackknife(X, y).scores_at(x_new);
}

ClosedFormScores closed_form_scores_submodel(const Matrix& Z, const Vector& y, const Vector& z_new) {
    return ClosedFormJackknife(Z, y).scores_at(z_new);
}

ClosedFormScores closed_form_scores(const FeatureMap& map, const Dataset& data, const Vector& x_new) {
    return closed_form_scores(map.expand_rows(data.x()), data.y(), map.expand(x_new));
}

HomeostasisReport homeostasis_report(const Matrix& Z, const Matrix& W, const Vector& beta, const Vector& x_new) {
    const auto q = Z.cols();
    const auto r = W.cols();
    if (Z.rows() != W.rows()) throw std::invalid_argument("Z and W must have the same rows");
    if (beta.size() != q + r || x_new.size() != q + r) {
        throw std::invalid_argument("beta and x_new must match the partitioned design");
    }
    const LeastSquares lz(Z);
    const Vector& g = lz.leverages();
    if ((g.array() >= 1.0 - kLeverageTolerance).any()) throw NumericError("leverage-one point");

    // (Z'Z)^{-1} Z' W, one column per W column.
    Matrix proj_coef(q, r);
    for (Eigen::Index k = 0; k < r; ++k) proj_coef.col(k) = lz.solve(W.col(k));

    const Vector beta2 = beta.tail(r);
    const Vector z_new = x_new.head(q);
    const Vector w_new = x_new.tail(r);

    HomeostasisReport report;
    report.w_perp = W - Z * proj_coef;
    report.bias = -w_new.dot(beta2) + z_new.dot(proj_coef * beta2);
    const Vector g_new = lz.cross_leverages(z_new);
    report.shifts = ((1.0 - g_new.array()) / (1.0 - g.array()) * (report.w_perp * beta2).array()).matrix();
    report.average_shift = report.shifts.mean();
    report.cancellation_gap = report.bias + report.average_shift;
    return report;
}

WidthOrderingTrial width_ordering_trial(const LinearScenario& scenario, std::size_t n, double alpha,
                                        const RngStream& rng) {
    LinearScenario sized = scenario;
    sized.n_train = n;
    const SimulatedData data = sized.generate(TestLaw::Iid, 0, rng);

    const FeatureMap full(FeatureKind::FullLinear, 2);
    const FeatureMap sub(FeatureKind::DropLast, 2);
    const Vector x_bar = data.train.covariate_mean();

    const auto true_scores = closed_form_scores(full, data.train, x_bar);
    const auto wrong_scores = closed_form_scores(sub, data.train, x_bar);
    return {true_scores.result(x_bar).interval(alpha).width(), wrong_scores.result(x_bar).interval(alpha).width()};
}

}  // namespace jkp
