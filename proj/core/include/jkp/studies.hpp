#pragma once

#include "jkp/conformal.hpp"
#include "jkp/learners.hpp"
#include "jkp/mlp.hpp"
#include "jkp/rng.hpp"
#include "jkp/scenarios.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace jkp {

/// Substream of a rep's rng used for model fitting.
inline constexpr std::uint64_t kFitStream = 3;

/// Coverage and mean width of predictive intervals over reps x test points.
struct MonteCarloReport {
    std::string scenario_id;  // e.g. "linear-iid"
    std::string learner_id;
    std::string estimator_id;
    double alpha = 0.05;
    std::size_t n_train = 0;
    std::size_t reps = 0;
    std::size_t test_points = 0;
    double coverage = 0.0;
    double avg_width = 0.0;
    std::uint64_t seed = 0;

    double width_stderr = 0.0;
    std::size_t clamped_intervals = 0;

    std::size_t evaluations() const { return reps * test_points; }
    /// Binomial standard error of the coverage estimate.
    double coverage_stderr() const;
};

struct CoverageStudyConfig {
    double alpha = 0.05;
    std::size_t reps = 200;
    std::size_t test_points = 1;
    /// Least-squares learners are scored in closed form instead of refitting.
    bool closed_form = true;
    unsigned threads = 1;
};

/// Per rep r (rng.split(r)): draw the training set once, build the
/// leave-one-out ensemble once, then score every test point of every
/// requested law. One report per law, in the order given.
std::vector<MonteCarloReport> run_coverage_study(const Scenario& scenario, const Learner& learner,
                                                 const std::string& estimator_id, std::span<const TestLaw> laws,
                                                 const CoverageStudyConfig& config, const RngStream& rng);

MonteCarloReport run_coverage_study(const Scenario& scenario, const Learner& learner, const std::string& estimator_id,
                                    TestLaw law, const CoverageStudyConfig& config, const RngStream& rng);

/// Mean squared error of each canonicalized parameter of the 3-2-1 network
/// under the two trainers. Parameter order: a11 a12 a13 a21 a22 a23 (A_1 by
/// row), then the two A_2 entries.
struct ParamMseTable {
    std::vector<std::string> parameter_names;
    Vector opt_mse;
    Vector single_mse;
    std::size_t n_train = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

ParamMseTable run_param_mse_study(const NnScenario& scenario, std::size_t reps, const TrainerConfig& opt,
                                  const TrainerConfig& single, const RngStream& rng, unsigned threads = 1);

/// Squared error per parameter (same order as ParamMseTable) after
/// canonicalizing both sides.
Vector canonical_parameter_errors(const MlpParams& fitted, const MlpParams& truth);

enum class XNewKind { SampleMean, IidDraw, ShiftedDraw, Explicit };

struct XNewSelection {
    XNewKind kind = XNewKind::SampleMean;
    Vector value;  // used when kind == Explicit
};

struct CurveRow {
    std::string learner;
    double y;
    double pv;
};

struct CurveTable {
    Vector x_new;
    double mu_new = 0.0;
    std::vector<CurveRow> rows;  // sorted by learner, then y
};

/// Conformal predictive curves of every learner at one test covariate, fit
/// on one training set drawn from `rng`, plus the oracle curve
/// 2 min(Phi((y - mu_new)/sigma), 1 - Phi(...)) under learner id "oracle".
CurveTable export_curves(const Scenario& scenario, std::span<const Learner* const> learners,
                         const XNewSelection& selection, std::size_t points, const RngStream& rng);

/// mu0..mu3 least-squares working models on covariates (z, w).
std::vector<OlsLearner> table1_learners();

struct LabeledLearner {
    std::shared_ptr<const Learner> learner;
    std::string estimator_id;
};

struct Table3Options {
    std::size_t deep_layers = 5;
    std::size_t deeper_layers = 10;
    TrainerConfig opt = TrainerConfig::opt_mse();
    TrainerConfig single = TrainerConfig::single_restart();
};

/// mu0 (opt-mse), mu0, mu1, mu2 (deep), mu3 (deeper) with the single-restart
/// trainer, and the covariate-free mu4.
std::vector<LabeledLearner> table3_learners(const Table3Options& options);

}  // namespace jkp
