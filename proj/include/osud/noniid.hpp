#pragma once

#include <cstdint>
#include <vector>

#include "osud/quantile_distribution.hpp"

namespace osud {
namespace noniid {

/// Independent, non-identical values with a shared disruption process.
struct NonIIDInstance {
    std::vector<QuantileDistribution> dists;
    double p = 0.0;
    double zeta = 0.0;

    long n() const { return static_cast<long>(dists.size()); }
    void validate() const;
};

struct OptProbEstimate {
    std::vector<double> z;         // per-step probability the benchmark reaches item i
    std::vector<double> z_stderr;  // binomial standard errors
    double opt_value = 0.0;
    double opt_stderr = 0.0;
    long trials = 0;
};

/// Monte Carlo over the benchmark (sort realized values descending, select
/// through the geometric disruption budget).
OptProbEstimate estimate_opt_probs(const NonIIDInstance& inst, long trials, std::uint64_t seed,
                                   int workers = 1);

/// Skip-then-threshold schedule: skip step i with probability eps[i], else
/// accept the top z[i] quantile mass. reach[i] * (1 - eps[i]) = 1/2 by
/// construction while the z-budget holds.
struct SkippingSchedule {
    std::vector<double> z;
    std::vector<double> tau;    // value thresholds (+inf where z = 0)
    std::vector<double> eps;    // skip probabilities
    std::vector<double> reach;  // R_i
};

/// Builds the closed-form schedule; rejects z-vectors whose prefix sums
/// exceed 1/p rather than clamping them.
SkippingSchedule build_schedule(const NonIIDInstance& inst, const std::vector<double>& z);

struct PolicyEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

PolicyEstimate policy_value(const NonIIDInstance& inst, const SkippingSchedule& schedule,
                            long trials, std::uint64_t seed, int workers = 1);

struct TightInstance {
    NonIIDInstance instance;
    double alg_value = 0.0;  // optimal online value (skip to the last item)
    double opt_value = 0.0;  // closed-form benchmark value
};

/// Deterministic low values followed by one long-shot item; the optimal
/// online policy waits, and the benchmark-to-online ratio tends to 2.
TightInstance tight_instance(long n, double eps_param, double p, double zeta = 0.0);

}  // namespace noniid
}  // namespace osud
