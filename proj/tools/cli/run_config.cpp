#include "cli/run_config.hpp"

#include <CLI11.hpp>

#include <algorithm>

namespace jkp::cli {

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> commands{"table1", "table2", "table3", "curves", "toy-curves", "verify"};
    return commands;
}

namespace {

bool needs_seed(const std::string& command) {
    return command != "verify";
}

template <class T>
void take(const CLI::App& app, const std::string& flag, const T& value, std::optional<T>& slot) {
    if (app.count(flag) > 0) slot = value;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args, std::string* help) {
    CLI::App app{"Jackknife-plus predictive inference simulations", "jkplus"};
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "Flat key=value settings file (# comments); flags win over it");

    RunConfig config;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string scale = "desk";
    double alpha = 0.0;
    std::size_t n_train = 0, reps = 0, depth = 0, deep_depth = 0, restarts = 0, test_points = 0, points = 0;

    app.add_option("command", config.command, "table1 | table2 | table3 | curves | toy-curves | verify")
        ->required()
        ->check(CLI::IsMember(known_commands()));
    app.add_option("--seed", seed, "Base seed (required except for verify)");
    app.add_option("--out", config.out, "Output path (default: stdout)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--scale", scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--alpha", alpha, "Miscoverage level in (0, 1)");
    app.add_option("--n-train", n_train, "Training sample size");
    app.add_option("--reps", reps, "Monte Carlo repetitions");
    app.add_option("--depth", depth, "Layers of the deep network mu2");
    app.add_option("--deep-depth", deep_depth, "Layers of the deeper network mu3");
    app.add_option("--restarts", restarts, "Opt-MSE restarts");
    app.add_option("--test-points", test_points, "Test points per repetition");
    app.add_option("--points", points, "Curve grid points");
    app.add_option("--scenario", config.scenario, "curves: linear | nn")->check(CLI::IsMember({"linear", "nn"}));
    app.add_option("--x-new", config.x_new, "curves: mean | iid | shift | comma-separated vector");
    app.add_option("--threads", config.threads, "Worker threads (results do not depend on it)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        if (help) *help = app.help();
        return config;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (app.count("--seed") > 0) config.seed = seed;
    config.format = format == "json" ? Format::Json : Format::Csv;
    config.scale = scale == "paper" ? Scale::Paper : Scale::Desk;
    take(app, "--alpha", alpha, config.alpha);
    take(app, "--n-train", n_train, config.n_train);
    take(app, "--reps", reps, config.reps);
    take(app, "--depth", depth, config.depth);
    take(app, "--deep-depth", deep_depth, config.deep_depth);
    take(app, "--restarts", restarts, config.restarts);
    take(app, "--test-points", test_points, config.test_points);
    take(app, "--points", points, config.points);

    if (needs_seed(config.command) && !config.seed) {
        throw UsageError("--seed is required for " + config.command);
    }
    if (config.alpha && !(*config.alpha > 0.0 && *config.alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }
    if (config.n_train && *config.n_train < 3) throw UsageError("--n-train must be at least 3");
    if (config.reps && *config.reps == 0) throw UsageError("--reps must be positive");
    if (config.restarts && *config.restarts == 0) throw UsageError("--restarts must be positive");
    if (config.test_points && *config.test_points == 0) throw UsageError("--test-points must be positive");
    if (config.points && *config.points < 2) throw UsageError("--points must be at least 2");
    if (config.depth && *config.depth < 2) throw UsageError("--depth must be at least 2");
    if (config.deep_depth && *config.deep_depth < 2) throw UsageError("--deep-depth must be at least 2");
    if (config.threads == 0) throw UsageError("--threads must be positive");
    return config;
}

Resolved resolve(const RunConfig& config) {
    const bool paper = config.scale == Scale::Paper;
    Resolved r{};
    r.alpha = config.alpha.value_or(0.05);
    r.restarts = config.restarts.value_or(20);
    r.points = config.points.value_or(200);
    r.test_points = config.test_points.value_or(1);
    r.depth = config.depth.value_or(paper ? 20 : 5);
    r.deep_depth = config.deep_depth.value_or(paper ? 100 : 10);
    if (config.command == "table1") {
        r.n_train = config.n_train.value_or(300);
        r.reps = config.reps.value_or(200);
    } else if (config.command == "table2") {
        r.n_train = config.n_train.value_or(300);
        r.reps = config.reps.value_or(10);
    } else if (config.command == "table3") {
        r.n_train = config.n_train.value_or(paper ? 300 : 100);
        r.reps = config.reps.value_or(paper ? 10 : 5);
        r.test_points = config.test_points.value_or(20);
    } else if (config.command == "toy-curves") {
        r.n_train = config.n_train.value_or(5);
        r.reps = config.reps.value_or(1);
    } else if (config.command == "curves") {
        const bool nn = config.scenario == "nn";
        r.n_train = config.n_train.value_or(nn && !paper ? 100 : 300);
        r.reps = config.reps.value_or(1);
    } else {
        r.n_train = config.n_train.value_or(300);
        r.reps = config.reps.value_or(200);
    }
    return r;
}

}  // namespace jkp::cli
