#include "jkp/studies.hpp"

#include "jkp/closed_form.hpp"
#include "jkp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace jkp {

double MonteCarloReport::coverage_stderr() const {
    const auto m = static_cast<double>(evaluations());
    return m > 0 ? std::sqrt(coverage * (1.0 - coverage) / m) : 0.0;
}

namespace {

struct PointOutcome {
    bool covered;
    double width;
    bool clamped;
};

// Scores one rep: a training set shared by every law, then each law's test points.
class RepScorer {
public:
    RepScorer(const Learner& learner, const Dataset& train, const CoverageStudyConfig& config, const RngStream& fit_rng) {
        if (const FeatureMap* map = learner.linear_features(); map != nullptr && config.closed_form) {
            map_ = *map;
            closed_.emplace(map->expand_rows(train.x()), train.y());
        } else {
            ensemble_.emplace(build_loo_ensemble(train, learner, fit_rng));
        }
    }

    PredictiveResult result(const Vector& x) const {
        if (closed_) return closed_->scores_at(map_->expand(x)).result(x);
        return conformal_scores(*ensemble_, x);
    }

private:
    std::optional<FeatureMap> map_;
    std::optional<ClosedFormJackknife> closed_;
    std::optional<LooEnsemble> ensemble_;
};

}  // namespace

std::vector<MonteCarloReport> run_coverage_study(const Scenario& scenario, const Learner& learner,
                                                 const std::string& estimator_id, std::span<const TestLaw> laws,
                                                 const CoverageStudyConfig& config, const RngStream& rng) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (config.reps == 0 || config.test_points == 0) throw std::invalid_argument("reps and test points must be positive");
    if (laws.empty()) throw std::invalid_argument("at least one test law required");

    // outcomes[rep][law][point]
    std::vector<std::vector<std::vector<PointOutcome>>> outcomes(config.reps);
    parallel_for(config.reps, config.threads, [&](std::size_t rep) {
        const RngStream rep_rng = rng.split(rep);
        try {
            std::vector<SimulatedData> data;
            for (TestLaw law : laws) data.push_back(scenario.generate(law, config.test_points, rep_rng));
            const RepScorer scorer(learner, data.front().train, config, rep_rng.split(kFitStream));
            auto& rep_out = outcomes[rep];
            rep_out.resize(laws.size());
            for (std::size_t l = 0; l < laws.size(); ++l) {
                for (Eigen::Index t = 0; t < data[l].test_x.rows(); ++t) {
                    const auto interval = scorer.result(data[l].test_x.row(t).transpose()).interval(config.alpha);
                    rep_out[l].push_back({interval.contains(data[l].test_y(t)), interval.width(), interval.clamped});
                }
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("coverage study rep " + std::to_string(rep) + ": " + e.what());
        }
    });

    std::vector<MonteCarloReport> reports;
    for (std::size_t l = 0; l < laws.size(); ++l) {
        MonteCarloReport report;
        report.scenario_id = scenario.id() + "-" + to_string(laws[l]);
        report.learner_id = learner.id();
        report.estimator_id = estimator_id;
        report.alpha = config.alpha;
        report.n_train = scenario.n_train;
        report.reps = config.reps;
        report.test_points = config.test_points;
        report.seed = rng.seed();

        double covered = 0.0;
        double width_sum = 0.0;
        double width_sq = 0.0;
        for (const auto& rep_out : outcomes) {
            for (const auto& o : rep_out[l]) {
                covered += o.covered ? 1.0 : 0.0;
                width_sum += o.width;
                width_sq += o.width * o.width;
                report.clamped_intervals += o.clamped ? 1 : 0;
            }
        }
        const auto m = static_cast<double>(report.evaluations());
        report.coverage = covered / m;
        report.avg_width = width_sum / m;
        const double var = m > 1 ? std::max(0.0, (width_sq - width_sum * width_sum / m) / (m - 1.0)) : 0.0;
        report.width_stderr = std::sqrt(var / m);
        reports.push_back(std::move(report));
    }
    return reports;
}

MonteCarloReport run_coverage_study(const Scenario& scenario, const Learner& learner, const std::string& estimator_id,
                                    TestLaw law, const CoverageStudyConfig& config, const RngStream& rng) {
    const TestLaw laws[] = {law};
    return run_coverage_study(scenario, learner, estimator_id, laws, config, rng).front();
}

Vector canonical_parameter_errors(const MlpParams& fitted, const MlpParams& truth) {
    const MlpParams canon = canonicalize_mlp(fitted, truth);
    const MlpParams ref = canonicalize_mlp(truth, truth);
    Vector err(8);
    const auto a1 = canon.layer(0);
    const auto r1 = ref.layer(0);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) err(3 * i + j) = std::pow(a1(i, j) - r1(i, j), 2);
    }
    err(6) = std::pow(canon.layer(1)(0, 0) - ref.layer(1)(0, 0), 2);
    err(7) = std::pow(canon.layer(1)(0, 1) - ref.layer(1)(0, 1), 2);
    return err;
}

ParamMseTable run_param_mse_study(const NnScenario& scenario, std::size_t reps, const TrainerConfig& opt,
                                  const TrainerConfig& single, const RngStream& rng, unsigned threads) {
    if (reps == 0) throw std::invalid_argument("reps must be positive");
    const auto arch = MlpArchitecture::true_network();
    std::vector<Vector> opt_err(reps);
    std::vector<Vector> single_err(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
        const RngStream rep_rng = rng.split(rep);
        const Dataset train = scenario.generate(TestLaw::Iid, 0, rep_rng).train;
        RngStream opt_rng = rep_rng.split(kFitStream);
        RngStream single_rng = rep_rng.split(kFitStream + 1);
        opt_err[rep] = canonical_parameter_errors(train_mlp(arch, train, opt, opt_rng).params, scenario.truth);
        single_err[rep] = canonical_parameter_errors(train_mlp(arch, train, single, single_rng).params, scenario.truth);
    });

    ParamMseTable table;
    table.parameter_names = {"a11", "a12", "a13", "a21", "a22", "a23", "a2_1", "a2_2"};
    table.opt_mse = Vector::Zero(8);
    table.single_mse = Vector::Zero(8);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        table.opt_mse += opt_err[rep];
        table.single_mse += single_err[rep];
    }
    table.opt_mse /= static_cast<double>(reps);
    table.single_mse /= static_cast<double>(reps);
    table.n_train = scenario.n_train;
    table.reps = reps;
    table.seed = rng.seed();
    return table;
}

CurveTable export_curves(const Scenario& scenario, std::span<const Learner* const> learners,
                         const XNewSelection& selection, std::size_t points, const RngStream& rng) {
    if (points < 2) throw std::invalid_argument("curve grid needs at least 2 points");
    const TestLaw law = selection.kind == XNewKind::ShiftedDraw ? TestLaw::Shifted : TestLaw::Iid;
    const SimulatedData data = scenario.generate(law, 1, rng);

    CurveTable table;
    switch (selection.kind) {
        case XNewKind::SampleMean: table.x_new = data.train.covariate_mean(); break;
        case XNewKind::IidDraw:
        case XNewKind::ShiftedDraw: table.x_new = data.test_x.row(0).transpose(); break;
        case XNewKind::Explicit:
            if (static_cast<std::size_t>(selection.value.size()) != scenario.covariate_dim()) {
                throw std::invalid_argument("explicit x_new has the wrong dimension");
            }
            table.x_new = selection.value;
            break;
    }
    table.mu_new = scenario.mean_response(table.x_new);

    const RngStream fit_rng = rng.split(kFitStream);
    double lo = table.mu_new - 4.0 * scenario.noise_sd();
    double hi = table.mu_new + 4.0 * scenario.noise_sd();
    for (const Learner* learner : learners) {
        const CoverageStudyConfig config;
        const RepScorer scorer(*learner, data.train, config, fit_rng);
        for (const auto& p : scorer.result(table.x_new).grid(points)) {
            table.rows.push_back({learner->id(), p.y, p.pv});
            lo = std::min(lo, p.y);
            hi = std::max(hi, p.y);
        }
    }

    const double sd = scenario.noise_sd();
    std::vector<double> ys;
    for (std::size_t k = 0; k < points; ++k) {
        ys.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
    }
    ys.push_back(table.mu_new);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    for (double y : ys) {
        const double q = normal_cdf((y - table.mu_new) / sd);
        table.rows.push_back({"oracle", y, 2.0 * std::min(q, 1.0 - q)});
    }

    std::stable_sort(table.rows.begin(), table.rows.end(), [](const CurveRow& a, const CurveRow& b) {
        return a.learner != b.learner ? a.learner < b.learner : a.y < b.y;
    });
    return table;
}

std::vector<OlsLearner> table1_learners() {
    return {make_linear_learner(FeatureKind::FullLinear), make_linear_learner(FeatureKind::DropLast),
            make_linear_learner(FeatureKind::FirstSquared), make_linear_learner(FeatureKind::InterceptOnly)};
}

std::vector<LabeledLearner> table3_learners(const Table3Options& options) {
    const auto true_arch = MlpArchitecture::true_network();
    std::vector<LabeledLearner> out;
    out.push_back({std::make_shared<MlpLearner>(true_arch, 3, options.opt, "mu0"), "opt-mse"});
    out.push_back({std::make_shared<MlpLearner>(true_arch, 3, options.single, "mu0"), "single-restart"});
    out.push_back({std::make_shared<MlpLearner>(MlpArchitecture::partial_network(), 3, options.single, "mu1"),
                   "single-restart"});
    out.push_back({std::make_shared<MlpLearner>(MlpArchitecture::deep_network(options.deep_layers), 3, options.single,
                                                "mu2"),
                   "single-restart"});
    out.push_back({std::make_shared<MlpLearner>(MlpArchitecture::deep_network(options.deeper_layers), 3,
                                                options.single, "mu3"),
                   "single-restart"});
    out.push_back({std::make_shared<OlsLearner>(FeatureMap(FeatureKind::InterceptOnly, 3), "mu4"), "ols"});
    return out;
}

}  // namespace jkp
