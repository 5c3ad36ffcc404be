#include "osud/dp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace osud {
namespace dp {

void DiscreteInstance::validate() const {
    if (n < 1) throw std::invalid_argument("discrete instance: n must be >= 1");
    if (values.empty() || values.size() != probs.size())
        throw std::invalid_argument("discrete instance: malformed support");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("discrete instance: p outside (0,1)");
    if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("discrete instance: zeta outside [0,1]");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw std::invalid_argument("discrete instance: negative value");
        if (i > 0 && values[i] <= values[i - 1])
            throw std::invalid_argument("discrete instance: support not strictly ascending");
        if (probs[i] <= 0.0) throw std::invalid_argument("discrete instance: nonpositive prob");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("discrete instance: probs must sum to 1");
}

DpSolution solve(const DiscreteInstance& inst) {
    inst.validate();
    const std::size_t m = inst.values.size();
    const double recov = 1.0 - (1.0 - inst.zeta) * inst.p;
    // tail_prob[k] = Pr[X >= values[k]], tail_mean[k] = E[X 1{X >= values[k]}]
    std::vector<double> tail_prob(m + 1, 0.0), tail_mean(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) {
        tail_prob[k] = tail_prob[k + 1] + inst.probs[k];
        tail_mean[k] = tail_mean[k + 1] + inst.probs[k] * inst.values[k];
    }
    DpSolution sol;
    sol.values.assign(static_cast<std::size_t>(inst.n) + 1, 0.0);
    sol.threshold_index.assign(static_cast<std::size_t>(inst.n), m);
    for (long i = inst.n; i >= 1; --i) {
        double next = sol.values[static_cast<std::size_t>(i)];
        double best = next;  // reject everything
        std::size_t best_k = m;
        for (std::size_t k = m; k-- > 0;) {
            // accepting the set {X >= values[k]}
            double v = next * (1.0 - inst.p * tail_prob[k]) + recov * tail_mean[k];
            if (v >= best) {  // ties resolve toward the lower threshold
                best = v;
                best_k = k;
            }
        }
        sol.values[static_cast<std::size_t>(i - 1)] = best;
        sol.threshold_index[static_cast<std::size_t>(i - 1)] = best_k;
    }
    return sol;
}

double brute_force_policy_value(const DiscreteInstance& inst,
                                const std::vector<double>& thresholds) {
    inst.validate();
    if (thresholds.size() != static_cast<std::size_t>(inst.n))
        throw std::invalid_argument("brute force: thresholds size != n");
    const std::size_t m = inst.values.size();
    double states = std::pow(static_cast<double>(m), static_cast<double>(inst.n));
    if (states > 1e7) throw std::invalid_argument("brute force: state space exceeds guard");
    const double recov = 1.0 - (1.0 - inst.zeta) * inst.p;
    std::vector<std::size_t> odometer(static_cast<std::size_t>(inst.n), 0);
    KahanSum total;
    bool done = false;
    while (!done) {
        double prob = 1.0;
        double payoff = 0.0;
        double survive = 1.0;  // probability all acceptances so far were retained
        for (long i = 0; i < inst.n; ++i) {
            std::size_t vi = odometer[static_cast<std::size_t>(i)];
            prob *= inst.probs[vi];
            double x = inst.values[vi];
            if (x >= thresholds[static_cast<std::size_t>(i)]) {
                payoff += survive * recov * x;
                survive *= 1.0 - inst.p;
            }
        }
        total.add(prob * payoff);
        // advance odometer
        done = true;
        for (std::size_t d = 0; d < odometer.size(); ++d) {
            if (++odometer[d] < m) {
                done = false;
                break;
            }
            odometer[d] = 0;
        }
    }
    return total.value();
}

namespace {

// Tabulated partial expectation of the upper-bound construction:
// spike of mass 1/n^2 at theta*n/(1-p) plus the decaying tail.
struct UpperBoundTable {
    double spike_mass;
    double spike_value;
    double u_max;
    std::vector<double> grid;  // over [spike_mass, u_max]
    std::vector<double> cum;   // ∫ tail from spike_mass to grid[k]

    double partial_expectation(double q) const {
        double spike_part = spike_value * std::min(q, spike_mass);
        if (q <= spike_mass) return spike_part;
        double x = std::min(q, u_max);
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        std::size_t k = static_cast<std::size_t>(it - grid.begin());
        if (k == 0) return spike_part;
        if (k >= grid.size()) return spike_part + cum.back();
        double t0 = grid[k - 1], t1 = grid[k];
        double w = (x - t0) / (t1 - t0);
        return spike_part + cum[k - 1] + w * (cum[k] - cum[k - 1]);
    }
};

UpperBoundTable build_upper_bound_table(double eps, double p, long n, const OdeSolution& y) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("bellman: eps outside (0,1)");
    const double dn = static_cast<double>(n);
    const double t_edge = 1.0 - eps;
    const double y_edge = y.y_at(t_edge);
    long floor_n = static_cast<long>(std::ceil(-std::log(y_edge) / p));
    if (n < floor_n)
        throw std::invalid_argument("bellman: n below the horizon floor " + std::to_string(floor_n));
    UpperBoundTable table;
    table.spike_mass = 1.0 / (dn * dn);
    table.spike_value = y.theta() * dn / (1.0 - p);
    table.u_max = -std::log(y_edge) / (p * dn);
    auto tail = [&](double u) {
        double v = std::exp(-p * dn * u);
        double x = v >= 1.0 ? 0.0 : y.inverse(v);
        if (x >= t_edge) return 0.0;
        return (p / (1.0 - p)) * y.integral_neg_inv_deriv(x, t_edge);
    };
    const int cells = 8192;
    table.grid.resize(cells + 1);
    table.cum.resize(cells + 1, 0.0);
    double lo = table.spike_mass;
    double prev_f = tail(lo);
    table.grid[0] = lo;
    KahanSum acc;
    for (int k = 1; k <= cells; ++k) {
        double u = lo + (table.u_max - lo) * k / cells;
        double f = tail(u);
        double um = 0.5 * (table.grid[k - 1] + u);
        double fm = tail(um);
        acc.add((u - table.grid[k - 1]) / 6.0 * (prev_f + 4.0 * fm + f));
        table.grid[k] = u;
        table.cum[k] = acc.value();
        prev_f = f;
    }
    return table;
}

}  // namespace

double bellman_upper_bound(double eps, double p, long n, const OdeSolution& y) {
    UpperBoundTable table = build_upper_bound_table(eps, p, n, y);
    double next = 0.0;
    const double q_hi = std::min(1.0, table.u_max);
    for (long i = n; i >= 1; --i) {
        auto objective = [&](double q) {
            return (1.0 - p) * table.partial_expectation(q) + (1.0 - p * q) * next;
        };
        auto [q_best, val] = golden_max(objective, 0.0, q_hi, 1e-13);
        val = std::max({val, objective(0.0), objective(q_hi)});
#ifndef NDEBUG
        for (int k = 0; k <= 128; ++k) assert(objective(q_hi * k / 128.0) <= val + 1e-9);
#endif
        next = val;
    }
    return next;
}

double opt_value_eps(double eps, double p, long n, const OdeSolution& y) {
    (void)p;
    const double dn = static_cast<double>(n);
    const double t_edge = 1.0 - eps;
    auto integrand = [&](double s) {
        double ys = y.y_at(s);
        double bracket = 1.0 - std::exp(dn * std::log1p(std::log(ys) / dn));
        return (-1.0 / y.rhs(ys)) * bracket;
    };
    double integral = adaptive_simpson(integrand, 0.0, t_edge, 1e-11, 1e-14).value;
    return y.theta() + integral;
}

}  // namespace dp
}  // namespace osud
