#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace osud {

inline constexpr double kOneMinusInvE = 0.63212055882855767840;  // 1 - 1/e

/// Splittable counter-based generator: cheap, portable, reproducible.
/// Each stream is fully determined by its 64-bit state, so per-trial
/// streams can be derived independently of scheduling order.
struct RngStream {
    std::uint64_t state = 0x9E3779B97F4A7C15ULL;

    explicit RngStream(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0,1]; never returns 0 so it is safe as a quantile.
    double next_quantile() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0,1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    /// Geometric on {1,2,...} with success probability p.
    long next_geometric(double p) {
        double u = next_quantile();
        if (p >= 1.0) return 1;
        double g = std::floor(std::log(u) / std::log1p(-p));
        return 1 + static_cast<long>(g);
    }
};

/// Derives an independent stream for (seed, index) pairs.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t index) {
    RngStream mixer(seed ^ (0xA24BAED4963EE407ULL + index * 0x9FB21C651E98DF25ULL));
    return RngStream(mixer.next_u64());
}

struct KahanSum {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

/// Sums in fixed pairwise order; result is independent of how the values
/// were produced (used for worker-count-invariant reductions).
double pairwise_sum(const std::vector<double>& xs);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

/// Adaptive Simpson with Richardson acceleration.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-11, double abs_tol = 1e-14,
                                  int max_depth = 52);

/// Composite Gauss-Legendre (order `order` per panel, `panels` panels).
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order = 20,
                      int panels = 64);

/// Bisection on [lo, hi]; requires f(lo) and f(hi) of opposite signs.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter = 200);

/// Golden-section maximization of a unimodal f on [lo, hi].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tol = 1e-12, int max_iter = 300);

/// log of Binomial(n,k) pmf at success probability p, -inf when impossible.
double log_binom_pmf(long n, long k, double p);

/// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
double reg_inc_beta(double x, double a, double b);

/// Pr[Binomial(n,p) >= k].
double binom_tail_geq(long n, long k, double p);

/// Pr[Poisson(lambda) >= k].
double poisson_tail_geq(double lambda, long k);

/// (1-x)^n evaluated as exp(n log1p(-x)); stable for small x, large n.
inline double pow1m(double x, double n) {
    if (x >= 1.0) return 0.0;
    return std::exp(n * std::log1p(-x));
}

}  // namespace osud
