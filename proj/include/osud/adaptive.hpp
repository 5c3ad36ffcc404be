#pragma once

#include <vector>

#include "osud/mc.hpp"
#include "osud/quantile_distribution.hpp"

namespace osud {
namespace adaptive {

/// Solved quantile-density schedule: breakpoints 0 = eps_0 < ... < eps_n = 1
/// and the normalization parameter theta_n. Step i samples its quantile from
/// a density proportional to (1-pq)^{n-2} on [eps_{i-1}, eps_i]. The segment
/// masses obey: the first integrates to 1, and each successive one equals
/// the previous integrated against (1-pq).
///
/// Internally everything is tracked through log G(eps_i), G(q) = (1-pq)^{n-1},
/// which stays finite where (1-p)^{n-1} itself underflows.
class AdaptiveSchedule {
  public:
    long n = 0;
    double p = 0.0;
    double zeta = 0.0;
    double theta = 0.0;
    std::vector<double> breakpoints;  // size n+1
    std::vector<double> log_g;        // log G(eps_i), size n+1

    /// log of the i-th segment mass (i in [1,n]).
    double log_normalizer(long i) const;

    /// Inverse-transform draw of the step-i quantile.
    double sample_quantile(long i, RngStream& rng) const;

    struct Residuals {
        double first_segment = 0.0;   // |segment-1 mass - 1|
        double recursion_max = 0.0;   // max relative defect across segments
    };
    /// Re-evaluates both normalization identities by independent quadrature.
    Residuals residuals() const;
};

/// Solves for the unique theta with eps_n = 1 by bisection (every breakpoint
/// is decreasing in theta). n = 1 degenerates to an accept-all schedule.
AdaptiveSchedule solve_schedule(long n, double p, double zeta);
AdaptiveSchedule solve_schedule(long n, double p, double zeta, double theta_lo, double theta_hi);

/// Closed-form value of the sampled-quantile policy under the schedule:
/// theta * (v(OPT) - n(1-(1-zeta)p)(1-p)^{n-1} E[X]).
double alg_value(const Instance& inst, const AdaptiveSchedule& schedule);

/// Lower bound on the competitive ratio: theta_n (1 - (1-p)^{n-1} pn / (1-(1-p)^n)).
double guarantee(long n, double p);

/// Episode policy that draws its per-step quantile from the schedule.
mc::Policy make_policy(const AdaptiveSchedule& schedule);

}  // namespace adaptive
}  // namespace osud
