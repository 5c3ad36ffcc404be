#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "osud/quantile_distribution.hpp"

namespace osud {
namespace mc {

/// One simulated run. `accepted_values` holds the retained (pre-disruption)
/// selections; the disrupting selection, if any, is recorded separately and
/// contributes zeta * value to `payoff` only.
struct Episode {
    std::vector<double> accepted_values;
    bool disrupted = false;
    std::optional<double> disrupting_value;
    double payoff = 0.0;      // sum objective
    double max_payoff = 0.0;  // largest retained selection, 0 if none
};

/// Online decision rule. Values are supplied one at a time together with the
/// quantile they were drawn at (which resolves threshold ties on atoms); the
/// stream is available for policy-internal randomization.
using Policy = std::function<bool(long step, double value, double quantile, RngStream& rng)>;

Episode run_episode(const Instance& inst, const Policy& policy, RngStream& rng);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

struct EstimatePair {
    Estimate sum_objective;
    Estimate max_objective;
};

/// Seeded estimate of both objectives. Per-trial streams are derived from
/// (seed, trial index), and reduction order is fixed, so results are
/// bit-identical for any worker count.
EstimatePair estimate(const Instance& inst, const Policy& policy, long trials, std::uint64_t seed,
                      int workers = 1);

/// Fixed-quantile policy: accept iff the draw lies in the top-q mass.
Policy fixed_quantile_policy(double q);

Policy accept_all_policy();
Policy reject_all_policy();

}  // namespace mc
}  // namespace osud
