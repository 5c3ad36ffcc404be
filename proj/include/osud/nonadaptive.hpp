#pragma once

#include "osud/quantile_distribution.hpp"

namespace osud {
namespace nonadaptive {

/// Guarantee-optimal fixed quantile min{1, 1/(pn)}.
double optimal_quantile(long n, double p);

/// Expected number of retained acceptances at quantile q:
/// A_n(q,p) = (1-p)(1-(1-qp)^n)/p.
double a_n(double q, double p, long n);

/// Closed-form value of the fixed-quantile policy,
/// (A_n(q,p) + zeta(1-(1-qp)^n)) * partial_expectation(q)/q.
double alg_value(const Instance& inst, double q);

/// Distribution-free lower bound on the competitive ratio at quantile q.
double eta_bound(long n, double p, double q);

/// Asymptotic guarantee (1-e^{-alpha})/alpha for the p = alpha/n regime.
double rare_disruption_bound(double alpha);

struct NonAdaptiveReport {
    double q = 0.0;
    double alg_value = 0.0;
    double opt_value = 0.0;
    double ratio = 0.0;
    double eta_bound = 0.0;
};

/// Evaluates the policy at q = optimal_quantile against the benchmark.
NonAdaptiveReport make_report(const Instance& inst);

struct HardInstanceReport {
    double lambda_star = 0.0;   // critical point of the scaled value, if found
    bool lambda_found = false;
    double alg_sup_value = 0.0; // best fixed-quantile value on the instance
    double opt_value = 0.0;
    double ratio = 0.0;
};

/// Best fixed-quantile value against the benchmark on the spike-plus-plateau
/// family, via the critical-point equation e^{-lp}(a1+a1pl+a2pl^2)=a1 plus
/// endpoint candidates, with the benchmark evaluated as a Poisson series.
HardInstanceReport hard_instance_report(double a1, double a2, double beta, double p, long n);

}  // namespace nonadaptive
}  // namespace osud
