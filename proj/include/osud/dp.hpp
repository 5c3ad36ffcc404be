#pragma once

#include <cstddef>
#include <vector>

#include "osud/hill_kertz.hpp"

namespace osud {
namespace dp {

/// Finite-support i.i.d. instance for exact oracles.
struct DiscreteInstance {
    long n = 0;
    std::vector<double> values;  // strictly ascending
    std::vector<double> probs;   // positive, summing to 1
    double p = 0.0;
    double zeta = 0.0;

    void validate() const;
};

/// Backward-induction solution. threshold_index[i] indexes the support:
/// step i+1 accepts values >= values[threshold_index[i]]; an index one past
/// the end means "reject everything".
struct DpSolution {
    std::vector<double> values;            // D_1..D_{n+1}, values.back() = 0
    std::vector<std::size_t> threshold_index;  // size n
};

DpSolution solve(const DiscreteInstance& inst);

/// Exact expected value of the per-step value-threshold policy, enumerating
/// all value sequences with the disruption process marginalized in closed
/// form. Guarded to |support|^n <= 10^7 states.
double brute_force_policy_value(const DiscreteInstance& inst,
                                const std::vector<double>& thresholds);

/// D_1^eps: quantile-space Bellman recursion over the upper-bound
/// distribution, sup over q by golden-section (the objective is concave).
double bellman_upper_bound(double eps, double p, long n, const OdeSolution& y);

/// v^eps(OPT) = theta* - ∫_0^{1-eps} (1/y')(1 - (1 + ln y / n)^n) ds.
double opt_value_eps(double eps, double p, long n, const OdeSolution& y);

}  // namespace dp
}  // namespace osud
