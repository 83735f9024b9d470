// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "oracles.hpp"

#include "cli/commands.hpp"
#include "cli/run_config.hpp"

#include <jkp/closed_form.hpp>
#include <jkp/conformal.hpp>
#include <jkp/gaussian_toy.hpp>
#include <jkp/mlp.hpp>
#include <jkp/studies.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace jkp;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool passed;
    std::string detail;
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Bisection on the erfc-based cdf, good to a few ulps.
double std_normal_quantile(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

cli::RunConfig config_for(std::vector<std::string> args) { return cli::parse_config(args); }

const MonteCarloReport* find_row(const std::vector<MonteCarloReport>& rows, const std::string& scenario,
                                 const std::string& learner, const std::string& estimator) {
    for (const auto& r : rows) {
        if (r.scenario_id == scenario && r.learner_id == learner && r.estimator_id == estimator) return &r;
    }
    return nullptr;
}

// Independent network evaluation: layer k is (out x in) column-major in the
// flat vector, ReLU after every layer.
double oracle_forward(const std::vector<std::size_t>& widths, const Vector& flat, const Vector& x) {
    std::vector<double> h(x.data(), x.data() + x.size());
    std::size_t offset = 0;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const std::size_t in = widths[k];
        const std::size_t out = widths[k + 1];
        std::vector<double> next(out, 0.0);
        for (std::size_t c = 0; c < in; ++c) {
            for (std::size_t r = 0; r < out; ++r) next[r] += flat(static_cast<Eigen::Index>(offset + c * out + r)) * h[c];
        }
        for (auto& v : next) v = std::max(v, 0.0);
        offset += in * out;
        h = std::move(next);
    }
    return h[0];
}

double oracle_loss(const std::vector<std::size_t>& widths, const Vector& flat, const Matrix& x, const Vector& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double e = y(i) - oracle_forward(widths, flat, x.row(i).transpose());
        total += e * e;
    }
    return total;
}

double oracle_min_preactivation(const std::vector<std::size_t>& widths, const Vector& flat, const Matrix& x) {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> h(static_cast<std::size_t>(x.cols()));
        for (Eigen::Index c = 0; c < x.cols(); ++c) h[static_cast<std::size_t>(c)] = x(i, c);
        std::size_t offset = 0;
        for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
            const std::size_t in = widths[k];
            const std::size_t out = widths[k + 1];
            std::vector<double> next(out, 0.0);
            for (std::size_t c = 0; c < in; ++c) {
                for (std::size_t r = 0; r < out; ++r) {
                    next[r] += flat(static_cast<Eigen::Index>(offset + c * out + r)) * h[c];
                }
            }
            for (auto& v : next) {
                smallest = std::min(smallest, std::abs(v));
                v = std::max(v, 0.0);
            }
            offset += in * out;
            h = std::move(next);
        }
    }
    return smallest;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_exe(const std::string& args, const fs::path& out) {
    const std::string cmd =
        std::string("\"") + JKPLUS_EXE + "\" " + args + " --out \"" + out.string() + "\" >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome closed_form_equivalence() {
    RngStream rng = RngStream(kSeed).split(1);
    double vs_engine = 0.0;
    double vs_refit = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = oracle::uniform_int(1, 4, rng);
        const std::size_t n = oracle::uniform_int(d + 5, 40, rng);
        const auto rows = static_cast<Eigen::Index>(n);
        const auto cols = static_cast<Eigen::Index>(d);
        const Matrix x = oracle::gaussian_matrix(rows, cols, rng) * 1.5;
        const Vector y = oracle::gaussian_vector(rows, rng) * 2.0 + x.rowwise().sum();
        const Vector x_new = oracle::gaussian_vector(cols, rng);
        const FeatureMap map(FeatureKind::FullLinear, d);
        const Dataset data(x, y);

        const Vector closed = closed_form_scores(map, data, x_new).scores;
        const OlsLearner learner(map, "ols");
        const Vector engine = conformal_scores(build_loo_ensemble(data, learner, rng.split(100 + trial)), x_new).scores();
        Matrix design(rows, cols + 1);
        design << Vector::Ones(rows), x;
        Vector design_new(cols + 1);
        design_new << 1.0, x_new;
        const Vector refit = oracle::refit_scores(design, y, design_new);

        vs_engine = std::max(vs_engine, (closed - engine).cwiseAbs().maxCoeff());
        vs_refit = std::max(vs_refit, (closed - refit).cwiseAbs().maxCoeff());
    }
    return {vs_engine < 1e-8 && vs_refit < 1e-8,
            "50 instances, max |closed - engine| " + fmt("%.2e", vs_engine) + ", max |closed - normal-equation refit| " +
                fmt("%.2e", vs_refit)};
}

Outcome coverage_umbrella() {
    LinearScenario scenario;
    scenario.n_train = 50;
    CoverageStudyConfig config;
    config.alpha = 0.10;
    config.reps = 2000;
    const RngStream rng = RngStream(kSeed).split(2);
    const OlsLearner mu0 = make_linear_learner(FeatureKind::FullLinear);
    const OlsLearner mu3 = make_linear_learner(FeatureKind::InterceptOnly);
    const FixedRuleLearner constant([](const Vector&) { return 1000.0; }, 2, "constant");
    const Learner* learners[] = {&mu0, &mu3, &constant};

    // binomial standard error at the guaranteed level
    const double se = std::sqrt(0.80 * 0.20 / static_cast<double>(config.reps));
    bool ok = true;
    std::string detail;
    for (const Learner* learner : learners) {
        const auto report = run_coverage_study(scenario, *learner, "umbrella", TestLaw::Iid, config, rng);
        bool pass = report.coverage >= 0.80 - 3.0 * se;
        if (learner == &mu0) pass = pass && report.coverage >= 0.86 && report.coverage <= 0.99;
        ok = ok && pass;
        detail += learner->id() + " " + fmt("%.4f", report.coverage) + (pass ? "" : " (miss)") + "; ";
    }
    return {ok, detail + "floor " + fmt("%.4f", 0.80 - 3.0 * se) + ", mu0 in [0.86, 0.99]"};
}

Outcome table1_reproduction() {
    const auto rows = cli::run_table1(config_for({"table1", "--seed", std::to_string(kSeed), "--scale", "paper"}));
    const char* ids[] = {"mu0", "mu1", "mu2", "mu3"};
    const double iid_cov[] = {.985, .96, .98, .98};
    const double shift_cov[] = {.985, .81, .345, .33};
    const double widths[] = {4.420, 6.957, 11.697, 12.147};
    bool ok = rows.size() == 8;
    std::string detail;
    for (int k = 0; k < 4; ++k) {
        const auto* iid = find_row(rows, "linear-iid", ids[k], "ols");
        const auto* shifted = find_row(rows, "linear-non-iid", ids[k], "ols");
        if (!iid || !shifted) return {false, "missing rows"};
        const bool c1 = std::abs(iid->coverage - iid_cov[k]) <= 0.04;
        const bool c2 = std::abs(shifted->coverage - shift_cov[k]) <= 0.04;
        const bool w = std::abs(iid->avg_width / widths[k] - 1.0) <= 0.20;
        ok = ok && c1 && c2 && w;
        detail += std::string(ids[k]) + " iid " + fmt("%.3f", iid->coverage) + (c1 ? "" : "!") + " non-iid " +
                  fmt("%.3f", shifted->coverage) + (c2 ? "" : "!") + " width " + fmt("%.3f", iid->avg_width) +
                  (w ? "" : "!") + "; ";
    }
    return {ok, detail + "(! marks out of tolerance)"};
}

Outcome width_ordering() {
    LinearScenario scenario;
    const RngStream rng = RngStream(kSeed).split(4);
    int wider = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto trial = width_ordering_trial(scenario, 300, 0.05, rng.split(t));
        wider += trial.width_wrong > trial.width_true ? 1 : 0;
    }
    double true_sum = 0.0;
    double wrong_sum = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto trial = width_ordering_trial(scenario, 2000, 0.05, rng.split(1000 + t));
        true_sum += trial.width_true;
        wrong_sum += trial.width_wrong;
    }
    // Limits: 2 z sigma, and 2 z sqrt(sigma^2 + b_w^2 Var(w | z)) with
    // Var(w | z) = 0.5 - 0.25^2 / 0.5.
    const double z = std_normal_quantile(0.975);
    const double limit_true = 2.0 * z;
    const double limit_wrong = 2.0 * z * std::sqrt(1.0 + 4.0 * (0.5 - 0.25 * 0.25 / 0.5));
    const double mt = true_sum / 50.0;
    const double mw = wrong_sum / 50.0;
    const bool ok = wider >= 190 && std::abs(mt / limit_true - 1.0) <= 0.10 && std::abs(mw / limit_wrong - 1.0) <= 0.10 &&
                    std::abs(mt / 3.92 - 1.0) <= 0.10 && std::abs(mw / 6.20 - 1.0) <= 0.10;
    return {ok, "submodel wider in " + std::to_string(wider) + "/200; n=2000 widths " + fmt("%.3f", mt) + " (limit " +
                    fmt("%.3f", limit_true) + "), " + fmt("%.3f", mw) + " (limit " + fmt("%.3f", limit_wrong) + ")"};
}

Outcome homeostasis() {
    LinearScenario scenario;
    const RngStream rng = RngStream(kSeed).split(5);
    const FeatureMap full(FeatureKind::FullLinear, 2);
    const FeatureMap sub(FeatureKind::DropLast, 2);
    std::vector<double> gap_medians;
    bool ok = true;
    double formula_err = 0.0;
    std::string detail;
    for (std::size_t n : {100, 200, 400}) {
        scenario.n_train = n;
        std::vector<double> gaps;
        std::vector<double> biases;
        for (std::uint64_t rep = 0; rep < 100; ++rep) {
            const Dataset train = scenario.generate(TestLaw::Iid, 0, rng.split(n * 1000 + rep)).train;
            const Matrix z = sub.expand_rows(train.x());
            const Matrix xfull = full.expand_rows(train.x());
            const Vector x_bar = full.expand(train.covariate_mean());
            const Vector z_bar = sub.expand(train.covariate_mean());
            // noise-free responses: bias and residual shifts are their expectations
            const Vector mean_y = xfull * scenario.beta;
            const double truth = x_bar.dot(scenario.beta);
            const double bias = z_bar.dot(oracle::normal_equations(z, mean_y)) - truth;
            const double gap = oracle::refit_scores(z, mean_y, z_bar).mean() - truth;
            gaps.push_back(std::abs(gap));
            biases.push_back(std::abs(bias));

            const auto report = homeostasis_report(z, train.x().rightCols(1), scenario.beta, x_bar);
            formula_err = std::max({formula_err, std::abs(report.bias - bias), std::abs(report.cancellation_gap - gap)});
        }
        const double mg = median(gaps);
        const double mb = median(biases);
        ok = ok && mg < 0.1 * mb;
        gap_medians.push_back(mg);
        detail += "n=" + std::to_string(n) + " median|gap| " + fmt("%.3e", mg) + " median|bias| " + fmt("%.3e", mb) + "; ";
    }
    const bool monotone = gap_medians[1] < gap_medians[0] && gap_medians[2] < gap_medians[1];
    ok = ok && monotone && formula_err < 1e-8;
    return {ok, detail + (monotone ? "gap decreasing" : "gap not decreasing") + ", formula vs refit " +
                    fmt("%.1e", formula_err)};
}

Outcome table3_desk() {
    const auto rows = cli::run_table3(config_for({"table3", "--seed", std::to_string(kSeed), "--scale", "desk"}));
    bool ok = rows.size() == 12;
    std::string detail;
    for (const auto& r : rows) {
        if (r.scenario_id != "nn-iid") continue;
        const bool pass = r.coverage >= 0.90;
        ok = ok && pass;
        detail += r.learner_id + "/" + r.estimator_id + " iid " + fmt("%.3f", r.coverage) + (pass ? "" : "!") + "; ";
    }
    for (const char* deep : {"mu2", "mu3"}) {
        const auto* r = find_row(rows, "nn-non-iid", deep, "single-restart");
        const bool pass = r && r->coverage <= 0.85;
        ok = ok && pass;
        detail += std::string(deep) + " non-iid " + (r ? fmt("%.3f", r->coverage) : "missing") + (pass ? "" : "!") + "; ";
    }
    const auto* opt = find_row(rows, "nn-non-iid", "mu0", "opt-mse");
    const auto* single = find_row(rows, "nn-non-iid", "mu0", "single-restart");
    if (!opt || !single) return {false, "missing mu0 rows"};
    for (const auto* r : {opt, single}) {
        const bool pass = r->coverage >= 0.90;
        ok = ok && pass;
        detail += "mu0/" + r->estimator_id + " non-iid " + fmt("%.3f", r->coverage) + (pass ? "" : "!") + "; ";
    }
    const bool narrower = opt->avg_width < single->avg_width;
    ok = ok && narrower;
    detail += "mu0 non-iid width opt " + fmt("%.3f", opt->avg_width) + " vs single " + fmt("%.3f", single->avg_width) +
              (narrower ? "" : "!");
    return {ok, detail};
}

Outcome table2_contrast() {
    const auto table = cli::run_table2(config_for({"table2", "--seed", std::to_string(kSeed)}));
    const double opt = table.opt_mse.sum();
    const double single = table.single_mse.sum();
    const bool ok = table.reps == 10 && table.n_train == 300 && opt < 0.25 * single;
    return {ok, "aggregate MSE opt " + fmt("%.4f", opt) + " vs single-restart " + fmt("%.4f", single) + " (ratio " +
                    fmt("%.3f", opt / single) + ")"};
}

Outcome gradient_check() {
    RngStream rng = RngStream(kSeed).split(8);
    const std::vector<std::vector<std::size_t>> shapes{{3, 2, 1}, {2, 1}, {3, 4, 3, 1}, {3, 5, 5, 5, 1}};
    const double h = 1e-6;
    double worst = 0.0;
    int accepted = 0;
    int attempts = 0;
    while (accepted < 100 && attempts < 100000) {
        ++attempts;
        const auto& widths = shapes[static_cast<std::size_t>(accepted) % shapes.size()];
        std::size_t count = 0;
        for (std::size_t k = 0; k + 1 < widths.size(); ++k) count += widths[k] * widths[k + 1];
        const auto n = static_cast<Eigen::Index>(oracle::uniform_int(4, 12, rng));
        const Matrix x = oracle::gaussian_matrix(n, static_cast<Eigen::Index>(widths[0]), rng);
        const Vector y = oracle::gaussian_vector(n, rng);
        const Vector flat = oracle::gaussian_vector(static_cast<Eigen::Index>(count), rng);
        if (oracle_min_preactivation(widths, flat, x) < 1e-3) continue;

        const MlpParams params(MlpArchitecture{widths}, flat);
        const Vector grad = mlp_gradient(params, Dataset(x, y)).flat();
        Vector fd(flat.size());
        for (Eigen::Index k = 0; k < flat.size(); ++k) {
            Vector up = flat;
            Vector down = flat;
            up(k) += h;
            down(k) -= h;
            fd(k) = (oracle_loss(widths, up, x, y) - oracle_loss(widths, down, x, y)) / (2.0 * h);
        }
        if (fd.norm() == 0.0 && grad.norm() == 0.0) continue;
        worst = std::max(worst, (grad - fd).norm() / std::max(grad.norm(), fd.norm()));
        ++accepted;
    }
    return {accepted == 100 && worst < 1e-5,
            std::to_string(accepted) + " instances, max relative error " + fmt("%.2e", worst)};
}

Outcome toy_module() {
    const RngStream base = RngStream(kSeed).split(9);

    RngStream ks_rng = base.split(0);
    const double theta = 1.35;
    std::vector<double> h(10000);
    for (auto& v : h) v = confidence_cdf(GaussianToySample::draw(theta, 5, ks_rng), theta);
    const double ks = oracle::ks_distance(h, [](double u) { return std::clamp(u, 0.0, 1.0); });

    RngStream data_rng = base.split(1);
    const std::size_t n = 2000;
    const auto rows = static_cast<Eigen::Index>(n);
    Vector y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) y(i) = theta + data_rng.normal();
    const OlsLearner intercept(FeatureMap(FeatureKind::InterceptOnly, 1), "mu3");
    const Dataset data(Matrix::Zero(rows, 1), y);
    const auto result = conformal_scores(build_loo_ensemble(data, intercept, base.split(2)), Vector::Zero(1));
    const double ybar = y.mean();
    const double sd = std::sqrt(1.0 + 1.0 / static_cast<double>(n));
    auto analytic = [&](double v) {
        const double q = std_normal_cdf((v - ybar) / sd);
        return 2.0 * std::min(q, 1.0 - q);
    };
    double sup = 0.0;
    for (const auto& p : result.grid(1000)) sup = std::max(sup, std::abs(p.pv - analytic(p.y)));
    for (double s : result.sorted_scores()) {
        sup = std::max({sup, std::abs(result.curve(s) - analytic(s)),
                        std::abs(result.curve(std::nextafter(s, -1e300)) - analytic(s))});
    }

    double level_err = 0.0;
    for (const double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
        for (const std::size_t m : {1, 5, 30}) {
            const GaussianToySample sample{1.2, m};
            const double zq = std_normal_quantile(1.0 - alpha / 2.0);
            const double conf_half = zq / std::sqrt(static_cast<double>(m));
            const double pred_half = zq * std::sqrt(1.0 + 1.0 / static_cast<double>(m));
            const auto conf = confidence_level_set(sample, alpha);
            const auto pred = predictive_level_set(sample, alpha);
            level_err = std::max({level_err, std::abs(conf.first - (1.2 - conf_half)),
                                  std::abs(conf.second - (1.2 + conf_half)), std::abs(pred.first - (1.2 - pred_half)),
                                  std::abs(pred.second - (1.2 + pred_half))});
        }
    }
    const bool ok = ks < 0.02 && sup < 0.05 && level_err < 1e-10;
    return {ok, "KS " + fmt("%.4f", ks) + ", conformal vs analytic sup " + fmt("%.4f", sup) + ", level-set error " +
                    fmt("%.1e", level_err)};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "jkplus_acceptance";
    fs::create_directories(dir);
    const std::string seed = " --seed " + std::to_string(kSeed);
    const std::vector<std::string> runs{
        "table1" + seed,
        "table1" + seed + " --format json",
        "table2" + seed + " --reps 2 --restarts 3",
        "table3" + seed + " --n-train 30 --reps 2 --test-points 5 --restarts 2 --depth 3 --deep-depth 4",
    };
    bool ok = true;
    std::string detail;
    int k = 0;
    for (const auto& args : runs) {
        const fs::path a = dir / ("run" + std::to_string(k) + "_a.out");
        const fs::path b = dir / ("run" + std::to_string(k) + "_b.out");
        ++k;
        const int sa = run_exe(args, a);
        const int sb = run_exe(args, b);
        const std::string ta = slurp(a);
        const bool same = sa == 0 && sb == 0 && !ta.empty() && ta == slurp(b);
        ok = ok && same;
        detail += args.substr(0, args.find(' ')) + (same ? " identical" : " DIFFERS") + "; ";
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    // optional arguments select criteria by name
    const std::vector<std::string> only(argv + 1, argv + argc);
    struct Criterion {
        const char* name;
        double budget_seconds;  // 0: none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"closed-form-oracle-equivalence", 10.0, closed_form_equivalence},
        {"coverage-umbrella", 60.0, coverage_umbrella},
        {"table1-paper-scale", 300.0, table1_reproduction},
        {"width-ordering-and-limits", 0.0, width_ordering},
        {"homeostasis-at-sample-mean", 0.0, homeostasis},
        {"table3-desk-scale", 0.0, table3_desk},
        {"table2-parameter-mse-contrast", 0.0, table2_contrast},
        {"gradient-check", 10.0, gradient_check},
        {"toy-module", 0.0, toy_module},
        {"determinism", 0.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool passed = outcome.passed;
        std::string timing = fmt("%.1fs", seconds);
        if (c.budget_seconds > 0.0) {
            timing += " of " + fmt("%.0fs", c.budget_seconds);
            if (seconds > c.budget_seconds) {
                passed = false;
                timing += " OVER BUDGET";
            }
        }
        failures += passed ? 0 : 1;
        std::cout << (passed ? "PASS " : "FAIL ") << c.name << ": " << outcome.detail << " [" << timing << "]"
                  << std::endl;
    }
    const std::size_t ran = only.empty() ? criteria.size() : only.size();
    std::cout << (ran - static_cast<std::size_t>(failures)) << "/" << ran << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
