#include "cli/output.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace jkp::cli {

using ordered_json = nlohmann::ordered_json;

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    std::string s(buf, res.ptr);
    if (s == "-0") s = "0";
    return s;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string dump(const ordered_json& j) {
    return j.dump(2) + "\n";
}

}  // namespace

std::string format_results(const std::vector<MonteCarloReport>& rows, Format format) {
    if (format == Format::Json) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            arr.push_back({{"scenario", r.scenario_id},
                           {"learner", r.learner_id},
                           {"estimator", r.estimator_id},
                           {"alpha", r.alpha},
                           {"n_train", r.n_train},
                           {"reps", r.reps},
                           {"test_points", r.test_points},
                           {"coverage", r.coverage},
                           {"avg_width", r.avg_width},
                           {"seed", r.seed}});
        }
        return dump(arr);
    }
    std::string out = std::string(kResultHeader) + "\n";
    for (const auto& r : rows) {
        out += csv_field(r.scenario_id) + "," + csv_field(r.learner_id) + "," + csv_field(r.estimator_id) + "," +
               fixed6(r.alpha) + "," + std::to_string(r.n_train) + "," + std::to_string(r.reps) + "," +
               std::to_string(r.test_points) + "," + fixed6(r.coverage) + "," + fixed6(r.avg_width) + "," +
               std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string format_curves(const std::vector<CurveRow>& rows, Format format) {
    if (format == Format::Json) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) arr.push_back({{"learner", r.learner}, {"y", r.y}, {"pv", r.pv}});
        return dump(arr);
    }
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& r : rows) out += csv_field(r.learner) + "," + shortest(r.y) + "," + shortest(r.pv) + "\n";
    return out;
}

std::string format_param_table(const ParamMseTable& table, Format format) {
    const auto count = table.parameter_names.size();
    if (format == Format::Json) {
        ordered_json arr = ordered_json::array();
        for (std::size_t k = 0; k < count; ++k) {
            const auto e = static_cast<Eigen::Index>(k);
            arr.push_back({{"parameter", table.parameter_names[k]},
                           {"opt_mse", table.opt_mse(e)},
                           {"single_restart_mse", table.single_mse(e)},
                           {"n_train", table.n_train},
                           {"reps", table.reps},
                           {"seed", table.seed}});
        }
        arr.push_back({{"parameter", "aggregate"},
                       {"opt_mse", table.opt_mse.sum()},
                       {"single_restart_mse", table.single_mse.sum()},
                       {"n_train", table.n_train},
                       {"reps", table.reps},
                       {"seed", table.seed}});
        return dump(arr);
    }
    std::string out = "parameter,opt_mse,single_restart_mse,n_train,reps,seed\n";
    auto line = [&](const std::string& name, double opt, double single) {
        out += name + "," + fixed6(opt) + "," + fixed6(single) + "," + std::to_string(table.n_train) + "," +
               std::to_string(table.reps) + "," + std::to_string(table.seed) + "\n";
    };
    for (std::size_t k = 0; k < count; ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        line(table.parameter_names[k], table.opt_mse(e), table.single_mse(e));
    }
    line("aggregate", table.opt_mse.sum(), table.single_mse.sum());
    return out;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << text;
    file.flush();
    if (!file) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace jkp::cli
