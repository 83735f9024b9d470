#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jkp::cli {

inline constexpr std::uint64_t kDefaultVerifySeed = 1;

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant suites: oracle-equivalence, prop1-umbrella, gradient-check,
/// hat-trace, toy-consistency. Each suite draws from its own substream of
/// `seed`.
std::vector<SuiteResult> run_verify(std::uint64_t seed, unsigned threads = 1);

SuiteResult verify_oracle_equivalence(std::uint64_t seed);
SuiteResult verify_prop1_umbrella(std::uint64_t seed, unsigned threads = 1);
SuiteResult verify_gradient_check(std::uint64_t seed);
SuiteResult verify_hat_trace(std::uint64_t seed);
SuiteResult verify_toy_consistency(std::uint64_t seed);

/// "PASS name: detail" / "FAIL name: detail", one line per suite.
std::string format_verify(const std::vector<SuiteResult>& suites);
bool all_passed(const std::vector<SuiteResult>& suites);

}  // namespace jkp::cli
