#include "cli/commands.hpp"

#include "cli/output.hpp"
#include "cli/verify.hpp"

#include <jkp/gaussian_toy.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>

namespace jkp::cli {

namespace {

constexpr TestLaw kBothLaws[] = {TestLaw::Iid, TestLaw::Shifted};

// toy sample is drawn from N(1.35, 1)
constexpr double kToyTheta = 1.35;

CoverageStudyConfig study_config(const Resolved& r, unsigned threads) {
    CoverageStudyConfig c;
    c.alpha = r.alpha;
    c.reps = r.reps;
    c.test_points = r.test_points;
    c.threads = threads;
    return c;
}

// IID rows first, then shifted rows; learners in the order given.
void append_by_law(std::vector<std::vector<MonteCarloReport>>& per_learner, std::vector<MonteCarloReport>& out) {
    for (std::size_t law = 0; law < std::size(kBothLaws); ++law) {
        for (auto& reports : per_learner) out.push_back(reports[law]);
    }
}

Table3Options table3_options(const Resolved& r) {
    Table3Options options;
    options.deep_layers = r.depth;
    options.deeper_layers = r.deep_depth;
    options.opt.restarts = r.restarts;
    return options;
}

void check_writable(const std::string& path) {
    if (path.empty()) return;
    std::ofstream probe(path, std::ios::binary | std::ios::app);
    if (!probe) throw UsageError("cannot write output file: " + path);
}

}  // namespace

XNewSelection parse_x_new(const std::string& text) {
    XNewSelection sel;
    if (text == "mean") return sel;
    if (text == "iid") {
        sel.kind = XNewKind::IidDraw;
        return sel;
    }
    if (text == "shift") {
        sel.kind = XNewKind::ShiftedDraw;
        return sel;
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, comma - start);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw UsageError("--x-new expects mean, iid, shift or a comma-separated vector, got '" + text + "'");
        }
        values.push_back(v);
        start = comma + 1;
    }
    sel.kind = XNewKind::Explicit;
    sel.value = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    return sel;
}

std::vector<MonteCarloReport> run_table1(const RunConfig& config) {
    const Resolved r = resolve(config);
    LinearScenario scenario;
    scenario.n_train = r.n_train;
    const RngStream rng(*config.seed);
    std::vector<std::vector<MonteCarloReport>> per_learner;
    for (const auto& learner : table1_learners()) {
        per_learner.push_back(
            run_coverage_study(scenario, learner, "ols", kBothLaws, study_config(r, config.threads), rng));
    }
    std::vector<MonteCarloReport> rows;
    append_by_law(per_learner, rows);
    return rows;
}

ParamMseTable run_table2(const RunConfig& config) {
    const Resolved r = resolve(config);
    NnScenario scenario;
    scenario.n_train = r.n_train;
    TrainerConfig opt = TrainerConfig::opt_mse();
    opt.restarts = r.restarts;
    return run_param_mse_study(scenario, r.reps, opt, TrainerConfig::single_restart(), RngStream(*config.seed),
                               config.threads);
}

std::vector<MonteCarloReport> run_table3(const RunConfig& config) {
    const Resolved r = resolve(config);
    if (config.scale == Scale::Paper) {
        std::clog << "jkplus: paper-scale table3 refits deep networks n times per rep; expect hours of compute\n";
    }
    NnScenario scenario;
    scenario.n_train = r.n_train;
    const RngStream rng(*config.seed);
    std::vector<std::vector<MonteCarloReport>> per_learner;
    for (const auto& labeled : table3_learners(table3_options(r))) {
        per_learner.push_back(run_coverage_study(scenario, *labeled.learner, labeled.estimator_id, kBothLaws,
                                                 study_config(r, config.threads), rng));
    }
    std::vector<MonteCarloReport> rows;
    append_by_law(per_learner, rows);
    return rows;
}

CurveTable run_curves(const RunConfig& config) {
    const Resolved r = resolve(config);
    const XNewSelection selection = parse_x_new(config.x_new);
    const Eigen::Index dim = config.scenario == "nn" ? 3 : 2;
    if (selection.kind == XNewKind::Explicit && selection.value.size() != dim) {
        throw UsageError("--x-new vector must have " + std::to_string(dim) + " entries for scenario " + config.scenario);
    }
    const RngStream rng(*config.seed);
    if (config.scenario == "nn") {
        NnScenario scenario;
        scenario.n_train = r.n_train;
        std::vector<std::shared_ptr<const Learner>> owned;
        for (const auto& labeled : table3_learners(table3_options(r))) {
            // mu0 appears once, with the Opt-MSE trainer.
            if (labeled.estimator_id == "single-restart" && labeled.learner->id() == "mu0") continue;
            owned.push_back(labeled.learner);
        }
        std::vector<const Learner*> learners;
        for (const auto& l : owned) learners.push_back(l.get());
        return export_curves(scenario, learners, selection, r.points, rng);
    }
    LinearScenario scenario;
    scenario.n_train = r.n_train;
    const auto owned = table1_learners();
    std::vector<const Learner*> learners;
    for (const auto& l : owned) learners.push_back(&l);
    return export_curves(scenario, learners, selection, r.points, rng);
}

std::vector<CurveRow> run_toy_curves(const RunConfig& config) {
    const Resolved r = resolve(config);
    RngStream rng(*config.seed);
    const auto sample = GaussianToySample::draw(kToyTheta, r.n_train, rng);
    const ToyCurves curves = toy_curves(sample, r.points);
    std::vector<CurveRow> rows;
    for (const auto& p : curves.confidence) rows.push_back({"confidence", p.y, p.pv});
    for (const auto& p : curves.predictive) rows.push_back({"predictive", p.y, p.pv});
    return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        std::string help;
        config = parse_config(args, &help);
        if (!help.empty()) {
            out << help;
            return 0;
        }
        if (config.command == "curves") parse_x_new(config.x_new);
        check_writable(config.out);
    } catch (const UsageError& e) {
        err << "jkplus: " << e.what() << "\n" << "Run with --help for usage.\n";
        return 2;
    }

    try {
        std::string text;
        int status = 0;
        if (config.command == "table1") {
            text = format_results(run_table1(config), config.format);
        } else if (config.command == "table2") {
            text = format_param_table(run_table2(config), config.format);
        } else if (config.command == "table3") {
            text = format_results(run_table3(config), config.format);
        } else if (config.command == "curves") {
            text = format_curves(run_curves(config).rows, config.format);
        } else if (config.command == "toy-curves") {
            text = format_curves(run_toy_curves(config), config.format);
        } else {
            const auto suites = run_verify(config.seed.value_or(kDefaultVerifySeed), config.threads);
            text = format_verify(suites);
            status = all_passed(suites) ? 0 : 1;
        }
        write_output(text, config.out);
        return status;
    } catch (const UsageError& e) {
        err << "jkplus: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "jkplus: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace jkp::cli
