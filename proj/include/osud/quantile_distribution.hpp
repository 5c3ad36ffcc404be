#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "osud/numerics.hpp"

namespace osud {

class OdeSolution;

/// A nonnegative value distribution represented through its upper-quantile
/// map q -> F^{-1}(1-q) on (0,1], as an ordered sequence of segments.
/// Atoms carry a constant value over their mass interval; continuous
/// segments carry a nonincreasing quantile function. Immutable once built.
class QuantileDistribution {
  public:
    struct Piece {
        enum class Kind { Atom, Continuous };
        Kind kind;
        double q_lo;  // mass interval (q_lo, q_hi]
        double q_hi;
        double value = 0.0;                         // atoms
        std::function<double(double)> quantile_fn;  // continuous
    };

    QuantileDistribution(std::vector<Piece> pieces, std::string label = {});

    /// F^{-1}(1-q) for q in (0,1]; throws std::domain_error outside.
    double inverse_cdf(double q) const;

    /// ∫_0^q F^{-1}(1-u) du for q in [0,1]; partial_expectation(1) = E[X].
    double partial_expectation(double q) const;

    double mean() const { return partial_expectation(1.0); }

    /// Draws F^{-1}(1-U), U uniform on (0,1].
    double sample(RngStream& rng) const { return inverse_cdf(rng.next_quantile()); }

    /// Draws a (value, quantile) pair; the quantile resolves atom ties.
    std::pair<double, double> sample_with_quantile(RngStream& rng) const {
        double u = rng.next_quantile();
        return {inverse_cdf(u), u};
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::string& label() const { return label_; }
    bool has_atoms() const;
    double top_value() const { return inverse_cdf(1e-12); }

  private:
    void validate() const;

    std::vector<Piece> pieces_;
    std::string label_;
};

/// A problem instance: horizon, value distribution, disruption probability,
/// and the fraction of the disrupting selection that is recovered.
struct Instance {
    long n;
    QuantileDistribution dist;
    double p;
    double zeta;

    Instance(long n_, QuantileDistribution dist_, double p_, double zeta_);
};

// ---- standard constructions ------------------------------------------------

QuantileDistribution uniform_dist(double a, double b);
QuantileDistribution point_mass(double value);
/// Exponential with the given rate, truncated at value `cap`.
QuantileDistribution truncated_exponential(double rate, double cap);
/// Distribution defined directly by a nonincreasing quantile function on (0,1].
QuantileDistribution from_quantile_fn(std::function<double(double)> fn, std::string label = {});
/// Discrete distribution from (value, probability) atoms; sorted and merged.
QuantileDistribution from_atoms(std::vector<std::pair<double, double>> value_prob,
                                std::string label = {});

/// Spike-plus-plateau family: value a1*n on a mass-1/n^2 atom (the smoothed
/// spike), value a2 out to quantile beta/n, zero beyond.
QuantileDistribution hard_instance_dist(double a1, double a2, double beta, long n);

/// The adaptive-upper-bound construction driven by the threshold ODE
/// solution: a mass-1/n^2 spike at theta*n/(1-(1-zeta)p) plus a decaying
/// continuous tail out to -log(y(1-eps))/(pn).
QuantileDistribution upper_bound_dist(double eps, double p, long n, double zeta,
                                      const OdeSolution& y);

}  // namespace osud
