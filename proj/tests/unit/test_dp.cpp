#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>

#include "osud/dp.hpp"
#include "osud/hill_kertz.hpp"
#include "osud/nonadaptive.hpp"
#include "osud/clairvoyant.hpp"
#include "osud/quantile_distribution.hpp"

using namespace osud;
using namespace osud::dp;

namespace {

DiscreteInstance coin_instance(long n, double p, double zeta) {
    DiscreteInstance inst;
    inst.n = n;
    inst.values = {0.0, 1.0};
    inst.probs = {0.5, 0.5};
    inst.p = p;
    inst.zeta = zeta;
    return inst;
}

std::vector<double> thresholds_of(const DiscreteInstance& inst, const DpSolution& sol) {
    std::vector<double> out;
    for (auto idx : sol.threshold_index)
        out.push_back(idx < inst.values.size() ? inst.values[idx]
                                               : std::numeric_limits<double>::infinity());
    return out;
}

}  // namespace

TEST_CASE("last step accepts everything") {
    auto inst = coin_instance(1, 0.5, 0.0);
    auto sol = solve(inst);
    CHECK(sol.threshold_index[0] == 0);
    CHECK(sol.values.back() == 0.0);
}

TEST_CASE("two-step coin instance solved by hand") {
    auto inst = coin_instance(2, 0.5, 0.0);
    auto sol = solve(inst);
    CHECK(sol.values[0] == doctest::Approx(0.4375).epsilon(1e-14));
    CHECK(sol.threshold_index[0] == 1);  // accept only the high value first
    CHECK(sol.threshold_index[1] == 0);  // then accept everything
    CHECK(brute_force_policy_value(inst, thresholds_of(inst, sol)) ==
          doctest::Approx(sol.values[0]).epsilon(1e-14));

    auto recovered = coin_instance(2, 0.5, 1.0);
    CHECK(solve(recovered).values[0] > sol.values[0]);
}

TEST_CASE("accept-all closed form at one step") {
    DiscreteInstance inst;
    inst.n = 1;
    inst.values = {0.5, 2.0};
    inst.probs = {0.25, 0.75};
    inst.p = 0.3;
    inst.zeta = 0.4;
    double mean = 0.25 * 0.5 + 0.75 * 2.0;
    CHECK(brute_force_policy_value(inst, {0.0}) ==
          doctest::Approx((1.0 - inst.p + inst.p * inst.zeta) * mean).epsilon(1e-14));
}

TEST_CASE("dp dominates fixed thresholds and swaps never help") {
    RngStream rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        DiscreteInstance inst;
        inst.n = 2 + static_cast<long>(rng.next_unit() * 5.0);
        std::size_t m = 2 + static_cast<std::size_t>(rng.next_unit() * 3.0);
        inst.p = 0.15 + 0.7 * rng.next_unit();
        inst.zeta = rng.next_unit();
        double v = 0.0, total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v += 0.1 + rng.next_unit();
            inst.values.push_back(v);
            inst.probs.push_back(0.1 + rng.next_unit());
            total += inst.probs.back();
        }
        for (auto& pr : inst.probs) pr /= total;
        double fix = 0.0;
        for (std::size_t i = 0; i + 1 < inst.probs.size(); ++i) fix += inst.probs[i];
        inst.probs.back() = 1.0 - fix;

        auto sol = solve(inst);
        CHECK(sol.values.back() == 0.0);
        for (std::size_t i = 0; i + 1 < sol.values.size(); ++i)
            CHECK(sol.values[i] >= sol.values[i + 1] - 1e-15);
        for (std::size_t i = 0; i + 1 < sol.threshold_index.size(); ++i)
            CHECK(sol.threshold_index[i] >= sol.threshold_index[i + 1]);
        auto thresholds = thresholds_of(inst, sol);
        CHECK(brute_force_policy_value(inst, thresholds) ==
              doctest::Approx(sol.values[0]).epsilon(1e-12));

        // every constant threshold is weakly worse
        for (double tau : inst.values) {
            std::vector<double> flat(static_cast<std::size_t>(inst.n), tau);
            CHECK(brute_force_policy_value(inst, flat) <= sol.values[0] + 1e-12);
        }
        // swapping a strictly decreasing adjacent pair never increases value
        for (std::size_t i = 0; i + 1 < thresholds.size(); ++i) {
            if (thresholds[i] <= thresholds[i + 1]) continue;
            auto swapped = thresholds;
            std::swap(swapped[i], swapped[i + 1]);
            CHECK(brute_force_policy_value(inst, swapped) <= sol.values[0] + 1e-12);
        }
    }
}

TEST_CASE("state-space guard trips") {
    DiscreteInstance inst;
    inst.n = 20;
    inst.values = {0.0, 1.0, 2.0, 3.0, 4.0};
    inst.probs = {0.2, 0.2, 0.2, 0.2, 0.2};
    inst.p = 0.5;
    inst.zeta = 0.0;
    CHECK_THROWS_AS(brute_force_policy_value(inst, std::vector<double>(20, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("discretized uniform converges to the closed-form policy value") {
    double p = 0.4, q = 0.37;
    long n = 3;
    Instance continuous(n, uniform_dist(0, 1), p, 0.0);
    double exact = nonadaptive::alg_value(continuous, q);
    double coarse_err = -1.0;
    for (std::size_t m : {8, 16, 32}) {
        DiscreteInstance inst;
        inst.n = n;
        inst.p = p;
        inst.zeta = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            inst.values.push_back((2.0 * i + 1.0) / (2.0 * m));
            inst.probs.push_back(1.0 / m);
        }
        double fix = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) fix += inst.probs[i];
        inst.probs.back() = 1.0 - fix;
        double tau = 1.0 - q;  // quantile-q threshold for the uniform
        double value = brute_force_policy_value(inst, std::vector<double>(n, tau));
        double err = std::abs(value - exact);
        CHECK(err < 1.5 / m);
        if (coarse_err < 0.0) coarse_err = err;
    }
    CHECK(coarse_err < 1.5 / 8.0);  // refinement stays inside O(1/m)
}

TEST_CASE("eta_sigma inequality holds along the curve") {
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta);
    RngStream rng(17);
    for (int k = 0; k < 20; ++k) {
        double sigma = 0.05 + 0.85 * rng.next_unit();
        long n = 20 + static_cast<long>(rng.next_unit() * 2000.0);
        double log_y_edge = std::log(y.y_at(1.0 - sigma));
        if (static_cast<double>(n) <= -log_y_edge) continue;  // outside the regime
        double eta = (n * sigma - log_y_edge * (1.0 - sigma)) /
                     ((1.0 - sigma) * (n + log_y_edge));
        CHECK(eta >= 0.0);
        for (long i = 1; i <= n; i += std::max<long>(1, n / 7)) {
            double log_yi = std::log(y.y_at((1.0 - sigma) * i / n));
            double expr = eta - sigma - sigma * eta +
                          log_yi / static_cast<double>(n) * (1.0 - sigma) * (1.0 + eta);
            CHECK(expr >= -1e-12);
        }
    }
}

TEST_CASE("continuous Bellman solution is stationary and maximal") {
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta);
    double p = 0.5;
    auto d = [&](double x) { return y.integral_neg_inv_deriv(x, y.t_end()); };
    auto h_tail = [&](double u) {  // p * d(y^{-1}(e^{-pu})) for u > 0
        double v = std::exp(-p * u);
        if (v <= y.values().back()) return 0.0;
        return p * d(v >= 1.0 ? 0.0 : y.inverse(v));
    };
    for (double x : {0.3, 0.6}) {
        double mu_star = -std::log(y.y_at(x)) / p;
        auto objective = [&](double mu) {
            double tail = adaptive_simpson(h_tail, 0.0, mu, 1e-11).value;
            return theta + tail - p * mu * d(x);
        };
        double target = -1.0 / y.rhs(y.y_at(x));  // -d'(x)
        CHECK(objective(mu_star) == doctest::Approx(target).epsilon(1e-5));
        CHECK(objective(mu_star) >= objective(mu_star * 0.8) - 1e-12);
        CHECK(objective(mu_star) >= objective(mu_star * 1.25) - 1e-12);
    }
}

TEST_CASE("bellman value against its continuous envelope") {
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta);
    double p = 0.5, eps = 1e-3;
    long n = 2000;
    double d1 = bellman_upper_bound(eps, p, n, y);
    for (double sigma : {0.05, 0.2}) {
        double log_y_edge = std::log(y.y_at(1.0 - sigma));
        REQUIRE(static_cast<double>(n) > -log_y_edge);
        double eta = (n * sigma - log_y_edge * (1.0 - sigma)) /
                     ((1.0 - sigma) * (n + log_y_edge));
        double envelope = (1.0 + eta) * y.integral_neg_inv_deriv((1.0 - sigma) / n, y.t_end());
        CHECK(d1 <= envelope + 1e-9);
    }
}

TEST_CASE("upper-bound distribution shape") {
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta);
    double p = 0.5, eps = 1e-2;
    long n = 400;
    auto dist = upper_bound_dist(eps, p, n, 0.0, y);
    // nonincreasing on a fine grid, zero at the top quantile
    double prev = dist.inverse_cdf(1e-9);
    for (int k = 1; k <= 1000; ++k) {
        double v = dist.inverse_cdf(k / 1000.0);
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
    CHECK(dist.inverse_cdf(1.0) == 0.0);
    // the spike carries theta*/((1-p)n) of the partial expectation
    double spike_mass = 1.0 / (static_cast<double>(n) * n);
    CHECK(dist.partial_expectation(spike_mass) ==
          doctest::Approx(theta / ((1.0 - p) * n)).epsilon(1e-10));
    // just past the spike the tail equals (p/(1-p)) ∫_0^{1-eps} -1/y'
    double tail_head = dist.inverse_cdf(spike_mass * 1.0001);
    double expected = (p / (1.0 - p)) * y.integral_neg_inv_deriv(0.0, 1.0 - eps);
    CHECK(tail_head == doctest::Approx(expected).epsilon(1e-3));
    CHECK(tail_head > 0.0);
    // horizon floor is enforced
    CHECK_THROWS_AS(upper_bound_dist(eps, p, 5, 0.0, y), std::invalid_argument);
    // recovery rescales both the spike and the tail
    auto dist_z = upper_bound_dist(eps, p, n, 1.0, y);
    CHECK(dist_z.partial_expectation(spike_mass) ==
          doctest::Approx(theta / n).epsilon(1e-10));
}

TEST_CASE("upper-bound benchmark value") {
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta);
    double p = 0.5, eps = 1e-2;
    // never below theta*, and the large-n integrand limit is (1-y)/(-y')
    double v1 = opt_value_eps(eps, p, 400, y);
    CHECK(v1 >= theta - 1e-9);
    auto limit_integrand = [&](double s) {
        double ys = y.y_at(s);
        return (1.0 - ys) * (-1.0 / y.rhs(ys));
    };
    double v_limit = theta + adaptive_simpson(limit_integrand, 0.0, 1.0 - eps, 1e-11).value;
    CHECK(opt_value_eps(eps, p, 100000, y) == doctest::Approx(v_limit).epsilon(1e-3));

    // agreement with the generic benchmark evaluated on the explicit distribution
    Instance inst(400, upper_bound_dist(eps, p, 400, 0.0, y), p, 0.0);
    double via_dist = clairvoyant::opt_value_quantile_form(inst);
    CHECK(via_dist == doctest::Approx(opt_value_eps(eps, p, 400, y)).epsilon(2e-3));
}
