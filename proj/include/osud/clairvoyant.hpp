#pragma once

#include <cstdint>
#include <utility>

#include "osud/quantile_distribution.hpp"

namespace osud {
namespace clairvoyant {

/// Kernel of the quantile representation of the benchmark:
/// g_n^{(zeta)}(p,q) = n(1-(1-zeta)p)(1-pq)^{n-1}.
double g_n(double p, double q, long n, double zeta);

/// E[min{Bin(n,v), D-1, n}] with D geometric(p).
double b_n(double p, double v, long n);

enum class OptFormula { QuantileForm, OrderStatistics, Both };

struct OptValueBreakdown {
    double value = 0.0;
    OptFormula by_formula = OptFormula::QuantileForm;
    double quadrature_error_estimate = 0.0;
};

/// Benchmark value v(OPT) = ∫_0^1 F^{-1}(1-q) g_n^{(zeta)}(p,q) dq.
/// For small horizons the order-statistics route is evaluated as well and
/// the two must agree within the combined quadrature tolerance.
OptValueBreakdown opt_value(const Instance& inst);

double opt_value_quantile_form(const Instance& inst, double* error_estimate = nullptr);

/// Independent route: per-order-statistic expectations weighted by the
/// disruption-survival series. Exact beta integrals on atoms, panel-adaptive
/// quadrature on continuous segments.
double opt_value_order_stats(const Instance& inst);

/// E[X_{(j)}] for the j-th largest of n draws.
double order_stat_mean(const QuantileDistribution& dist, long n, long j);

/// Monte Carlo estimate (mean, standard error) of the benchmark; bit-stable
/// for fixed (seed, trials) independent of worker count.
std::pair<double, double> opt_value_mc(const Instance& inst, long trials, std::uint64_t seed,
                                       int workers = 1);

}  // namespace clairvoyant
}  // namespace osud
