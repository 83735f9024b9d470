#include "cli/verify.hpp"

#include <jkp/closed_form.hpp>
#include <jkp/conformal.hpp>
#include <jkp/gaussian_toy.hpp>
#include <jkp/mlp.hpp>
#include <jkp/studies.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace jkp::cli {

namespace {

enum SuiteStream : std::uint64_t { kOracle = 1, kUmbrella, kGradient, kHat, kToy };

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    }
    return m;
}

std::size_t uniform_index(std::size_t lo, std::size_t hi, RngStream& rng) {
    return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

// Smallest |pre-activation| over the dataset; kinks live at zero.
double min_abs_preactivation(const MlpParams& params, const Matrix& x) {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        Vector h = x.row(r).transpose();
        for (std::size_t k = 0; k < params.layer_count(); ++k) {
            const Vector pre = params.layer(k) * h;
            smallest = std::min(smallest, pre.cwiseAbs().minCoeff());
            h = pre.cwiseMax(0.0);
        }
    }
    return smallest;
}

}  // namespace

SuiteResult verify_oracle_equivalence(std::uint64_t seed) {
    RngStream rng = RngStream(seed).split(kOracle);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t p = uniform_index(1, 5, rng);
        const std::size_t n = uniform_index(p + 4, 40, rng);
        const auto d = static_cast<Eigen::Index>(p - 1);
        const Matrix raw = random_matrix(static_cast<Eigen::Index>(n), d, rng);
        Vector y = random_matrix(static_cast<Eigen::Index>(n), 1, rng).col(0) * 2.0;
        const Vector x_new = random_matrix(d, 1, rng).col(0);

        const FeatureMap map(d == 0 ? FeatureKind::InterceptOnly : FeatureKind::FullLinear,
                             static_cast<std::size_t>(std::max<Eigen::Index>(d, 1)));
        const Matrix cov = d == 0 ? Matrix::Zero(static_cast<Eigen::Index>(n), 1) : raw;
        const Vector xn = d == 0 ? Vector::Zero(1) : x_new;
        const Dataset data(cov, y);
        const OlsLearner learner(map, "ols");
        const auto closed = closed_form_scores(map, data, xn).scores;
        const auto brute = conformal_scores(build_loo_ensemble(data, learner, rng.split(1000 + trial)), xn).scores();
        worst = std::max(worst, (closed - brute).cwiseAbs().maxCoeff());
    }
    return {"oracle-equivalence", worst < 1e-8, "50 instances, max |closed - refit| = " + num(worst)};
}

SuiteResult verify_prop1_umbrella(std::uint64_t seed, unsigned threads) {
    const RngStream rng = RngStream(seed).split(kUmbrella);
    LinearScenario scenario;
    scenario.n_train = 50;
    CoverageStudyConfig config;
    config.alpha = 0.10;
    config.reps = 2000;
    config.threads = threads;
    const double floor = 1.0 - 2.0 * config.alpha -
                         3.0 * std::sqrt(2.0 * config.alpha * (1.0 - 2.0 * config.alpha) / config.reps);

    const OlsLearner mu0 = make_linear_learner(FeatureKind::FullLinear);
    const OlsLearner mu3 = make_linear_learner(FeatureKind::InterceptOnly);
    const FixedRuleLearner constant([](const Vector&) { return 1000.0; }, 2, "constant");
    const FixedRuleLearner absurd([](const Vector& x) { return -1000.0 * x(0); }, 2, "absurd");
    const Learner* learners[] = {&mu0, &mu3, &constant, &absurd};

    bool ok = true;
    std::string detail;
    for (const Learner* learner : learners) {
        const auto report = run_coverage_study(scenario, *learner, "umbrella", TestLaw::Iid, config, rng);
        bool pass = report.coverage >= floor;
        if (learner == &mu0) pass = pass && report.coverage >= 0.86 && report.coverage <= 0.99;
        ok = ok && pass;
        detail += (detail.empty() ? "" : ", ") + learner->id() + "=" + num(report.coverage);
    }
    return {"prop1-umbrella", ok, "coverage " + detail + " (floor " + num(floor) + ")"};
}

SuiteResult verify_gradient_check(std::uint64_t seed) {
    RngStream rng = RngStream(seed).split(kGradient);
    const MlpArchitecture shapes[] = {MlpArchitecture::true_network(), MlpArchitecture::partial_network(),
                                      MlpArchitecture{{3, 4, 3, 1}}};
    const double h = 1e-5;
    double worst = 0.0;
    int accepted = 0;
    int attempts = 0;
    while (accepted < 100 && attempts < 100000) {
        ++attempts;
        const auto& arch = shapes[accepted % 3];
        const auto n = static_cast<Eigen::Index>(uniform_index(5, 10, rng));
        const Matrix x = random_matrix(n, static_cast<Eigen::Index>(arch.input_dim()), rng);
        const Vector y = random_matrix(n, 1, rng).col(0);
        MlpParams params(arch, random_matrix(static_cast<Eigen::Index>(arch.parameter_count()), 1, rng).col(0));
        if (min_abs_preactivation(params, x) < 1e-3) continue;

        const Dataset data(x, y);
        const Vector grad = mlp_gradient(params, data).flat();
        Vector fd(grad.size());
        for (Eigen::Index k = 0; k < grad.size(); ++k) {
            MlpParams up = params;
            MlpParams down = params;
            up.flat()(k) += h;
            down.flat()(k) -= h;
            fd(k) = (mlp_total_loss(up, data) - mlp_total_loss(down, data)) / (2.0 * h);
        }
        const double scale = std::max(grad.norm(), 1e-8);
        worst = std::max(worst, (grad - fd).norm() / scale);
        ++accepted;
    }
    return {"gradient-check", accepted == 100 && worst < 1e-5,
            std::to_string(accepted) + " instances, max relative error = " + num(worst)};
}

SuiteResult verify_hat_trace(std::uint64_t seed) {
    RngStream rng = RngStream(seed).split(kHat);
    double trace_err = 0.0;
    double mean_err = 0.0;
    double self_err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = static_cast<Eigen::Index>(uniform_index(1, 6, rng));
        const auto n = static_cast<Eigen::Index>(uniform_index(static_cast<std::size_t>(p) + 2, 60, rng));
        Matrix X = random_matrix(n, p, rng);
        X.col(0).setOnes();
        const Vector mean_row = X.colwise().mean().transpose();
        const auto hv = hat_values(X, mean_row);
        trace_err = std::max(trace_err, std::abs(hv.diag.sum() - static_cast<double>(p)));
        mean_err = std::max(mean_err, (hv.cross.array() - 1.0 / static_cast<double>(n)).abs().maxCoeff());
        const auto j = static_cast<Eigen::Index>(uniform_index(0, static_cast<std::size_t>(n - 1), rng));
        const auto at_row = hat_values(X, X.row(j).transpose());
        self_err = std::max(self_err, std::abs(at_row.cross(j) - at_row.diag(j)));
    }
    const bool ok = trace_err < 1e-8 && mean_err < 1e-10 && self_err < 1e-10;
    return {"hat-trace", ok,
            "trace err " + num(trace_err) + ", mean-row err " + num(mean_err) + ", self err " + num(self_err)};
}

SuiteResult verify_toy_consistency(std::uint64_t seed) {
    const RngStream base = RngStream(seed).split(kToy);

    // H_n at the true theta is Uniform(0, 1).
    RngStream ks_rng = base.split(0);
    const double theta = 1.35;
    std::vector<double> h(10000);
    for (auto& v : h) v = confidence_cdf(GaussianToySample::draw(theta, 5, ks_rng), theta);
    std::sort(h.begin(), h.end());
    double ks = 0.0;
    const auto m = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        ks = std::max({ks, static_cast<double>(i + 1) / m - h[i], h[i] - static_cast<double>(i) / m});
    }

    // Conformal curve of the intercept-only learner vs the analytic curve.
    RngStream data_rng = base.split(1);
    const std::size_t n = 2000;
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(n), 1);
    Vector y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = theta + data_rng.normal();
    const Dataset data(x, y);
    const OlsLearner intercept(FeatureMap(FeatureKind::InterceptOnly, 1), "mu3");
    const auto result = conformal_scores(build_loo_ensemble(data, intercept, base.split(2)), Vector::Zero(1));
    const GaussianToySample sample{y.mean(), n};
    double sup = 0.0;
    for (const auto& p : result.grid(400)) sup = std::max(sup, std::abs(p.pv - predictive_curve_toy(sample, p.y)));

    // Level sets against the 97.5% normal quantile.
    const double z975 = 1.959963984540054;
    const GaussianToySample five{1.2, 5};
    const auto conf = confidence_level_set(five, 0.05);
    const auto pred = predictive_level_set(five, 0.05);
    const double level_err = std::max({std::abs(conf.first - (1.2 - z975 / std::sqrt(5.0))),
                                       std::abs(conf.second - (1.2 + z975 / std::sqrt(5.0))),
                                       std::abs(pred.first - (1.2 - z975 * std::sqrt(1.2))),
                                       std::abs(pred.second - (1.2 + z975 * std::sqrt(1.2)))});

    const bool ok = ks < 0.02 && sup < 0.05 && level_err < 1e-10;
    return {"toy-consistency", ok,
            "KS " + num(ks) + ", conformal sup gap " + num(sup) + ", level-set err " + num(level_err)};
}

std::vector<SuiteResult> run_verify(std::uint64_t seed, unsigned threads) {
    return {verify_oracle_equivalence(seed), verify_prop1_umbrella(seed, threads), verify_gradient_check(seed),
            verify_hat_trace(seed), verify_toy_consistency(seed)};
}

std::string format_verify(const std::vector<SuiteResult>& suites) {
    std::string out;
    for (const auto& s : suites) out += std::string(s.passed ? "PASS " : "FAIL ") + s.name + ": " + s.detail + "\n";
    return out;
}

bool all_passed(const std::vector<SuiteResult>& suites) {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

}  // namespace jkp::cli
