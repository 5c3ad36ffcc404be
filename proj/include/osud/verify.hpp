#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace osud {
namespace verify {

struct CheckResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct Options {
    bool quick = false;      // reduced trials/grids, smoke-level
    int workers = 1;         // forwarded to Monte Carlo estimators
    std::uint64_t seed = 20250808;
    bool inject_theta_fault = false;  // negative control: corrupts theta*
};

/// Runs the full verification suite (12 checks) and returns per-check results.
std::vector<CheckResult> run_suite(const Options& options);

/// One line per check: "[PASS] 01 name detail". The rendered output is
/// byte-stable for a fixed seed regardless of worker count; timings are
/// appended only when requested.
void print_results(const std::vector<CheckResult>& results, std::ostream& out,
                   bool with_timing = false);

bool all_passed(const std::vector<CheckResult>& results);

/// Twelve smooth distributions used as the guarantee fixture set.
struct FixtureSet;

}  // namespace verify
}  // namespace osud
