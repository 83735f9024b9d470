#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jkp::cli {

enum class Format { Csv, Json };
enum class Scale { Desk, Paper };

/// Bad flags, bad values, missing seed. Maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw settings after merging flags over the config file. Unset optionals
/// take per-command defaults, see the resolve_* helpers.
struct RunConfig {
    std::string command;
    std::optional<std::uint64_t> seed;
    std::string out;  // empty: stdout
    Format format = Format::Csv;
    Scale scale = Scale::Desk;
    std::optional<double> alpha;
    std::optional<std::size_t> n_train;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> deep_depth;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> test_points;
    std::optional<std::size_t> points;
    std::string scenario = "linear";
    std::string x_new = "mean";
    unsigned threads = 1;
};

const std::vector<std::string>& known_commands();

/// Flags override the --config file, which overrides defaults. Throws
/// UsageError; `help` is set instead when --help was requested.
RunConfig parse_config(const std::vector<std::string>& args, std::string* help = nullptr);

/// Effective settings for a command.
struct Resolved {
    double alpha;
    std::size_t n_train;
    std::size_t reps;
    std::size_t test_points;
    std::size_t depth;
    std::size_t deep_depth;
    std::size_t restarts;
    std::size_t points;
};

Resolved resolve(const RunConfig& config);

}  // namespace jkp::cli
