#pragma once

#include "osud/mc.hpp"
#include "osud/quantile_distribution.hpp"

namespace osud {
namespace maxvariant {

/// How a disrupting selection counts toward the largest-value objective.
/// The default excludes it (it contributes nothing); the alternative mode
/// lets it compete for the maximum.
enum class CountingMode { ExcludeDisruptor, IncludeDisruptor };

/// Episode payoff under the chosen counting convention.
double episode_max_payoff(const mc::Episode& episode,
                          CountingMode mode = CountingMode::ExcludeDisruptor);

/// Benchmark for the largest-value objective: (1-p) E[X_(1)].
double opt_value_max(const Instance& inst);

/// Fixed-quantile policy value for the largest-value objective, via the
/// conditional-maximum series: sum over acceptance counts of geometric
/// disruption weights times mu_l = E[max of l draws | all in the top-q mass].
double alg_value_max(const Instance& inst, double q);

/// Conditional maximum of l top-q draws, evaluated from the quantile
/// integral (binomial-free; stable for large l).
double conditional_max(const QuantileDistribution& dist, double q, long l);

/// Single-integral cross-check of alg_value_max for piecewise-smooth
/// distributions (no atoms).
double alg_value_max_integral(const Instance& inst, double q);

struct MaxBoundResult {
    double lambda = 0.0;  // maximizing lambda with q = lambda/n
    double bound = 0.0;
};

/// max over lambda of min{(1-(1-qp)^n)/(npq), 1-(1-q)^n} at q = lambda/n.
MaxBoundResult cr_lower_bound_max(long n, double p);

struct MaxHardReport {
    double alg_sup = 0.0;
    double opt = 0.0;
    double ratio = 0.0;
    double t_star = 0.0;
};

/// Asymptotic spike-plus-plateau analysis for the largest-value objective.
MaxHardReport hard_instance_max(double a1, double a2, double beta, double p, long n);

/// The branch-1 objective (1-p)[a2(1-e^{-t}) + a1(1-e^{-pt})/(pt)]; exposed
/// for quasiconcavity sweeps.
double hard_instance_objective(double t, double a1, double a2, double p);

/// R(v) whose monotonicity on (0,q] drives the lower-bound reduction.
double ratio_curve(double v, double q, double p, long n);

struct MaxVariantReport {
    double q = 0.0;
    double alg_value = 0.0;
    double opt_value = 0.0;
    double ratio = 0.0;
    double lower_bound = 0.0;  // finite-n min{...} at this q
};

MaxVariantReport make_report(const Instance& inst, double q);

}  // namespace maxvariant
}  // namespace osud
