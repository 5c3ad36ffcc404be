#include <doctest.h>

#include <cmath>

#include "osud/clairvoyant.hpp"

using namespace osud;
using namespace osud::clairvoyant;

namespace {

// independent oracle: E[min{Bin(n,v), D-1, n}] by direct enumeration over
// the binomial support and the (truncated) geometric support
double b_n_oracle(double p, double v, long n) {
    double total = 0.0;
    for (long k = 0; k <= n; ++k) {
        double pk = std::exp(log_binom_pmf(n, k, v));
        double inner = 0.0;
        double pd = p;  // Pr[D = 1]
        for (long d = 1; d <= 4000; ++d) {
            inner += pd * std::min<long>(k, d - 1);
            pd *= 1.0 - p;
        }
        total += pk * inner;
    }
    return total;
}

}  // namespace

TEST_CASE("g_n closed form") {
    CHECK(g_n(0.5, 0.0, 4, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g_n(0.3, 0.7, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g_n(0.5, 1.0, 2, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    // strictly decreasing in q
    CHECK(g_n(0.5, 0.2, 6, 0.0) > g_n(0.5, 0.3, 6, 0.0));
}

TEST_CASE("b_n against enumeration oracle") {
    CHECK(b_n(0.5, 1.0, 2) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(b_n(0.5, 0.0, 7) == 0.0);
    CHECK(b_n(0.5, 0.5, 1) == doctest::Approx(0.25).epsilon(1e-12));
    for (double p : {0.2, 0.6})
        for (double v : {0.1, 0.5, 0.9})
            for (long n : {1L, 3L, 8L})
                CHECK(b_n(p, v, n) == doctest::Approx(b_n_oracle(p, v, n)).epsilon(1e-10));
}

TEST_CASE("benchmark value on uniform instances") {
    Instance one(1, uniform_dist(0, 1), 0.5, 0.0);
    CHECK(opt_value(one).value == doctest::Approx(0.25).epsilon(1e-10));

    Instance two(2, uniform_dist(0, 1), 0.5, 0.0);
    auto breakdown = opt_value(two);
    CHECK(breakdown.value == doctest::Approx(5.0 / 12.0).epsilon(1e-10));
    CHECK(breakdown.by_formula == OptFormula::Both);
    CHECK(breakdown.quadrature_error_estimate < 1e-8);

    Instance recover(1, uniform_dist(0, 1), 0.5, 1.0);
    CHECK(opt_value(recover).value == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("order statistics of the uniform") {
    // E[X_(j)] = (n+1-j)/(n+1)
    auto u = uniform_dist(0, 1);
    for (long j : {1L, 3L, 5L})
        CHECK(order_stat_mean(u, 5, j) == doctest::Approx((6.0 - j) / 6.0).epsilon(1e-10));
}

TEST_CASE("both benchmark representations agree") {
    for (double p : {0.1, 0.5, 0.9})
        for (double zeta : {0.0, 0.5, 1.0}) {
            Instance inst(10, truncated_exponential(1.0, 5.0), p, zeta);
            double v1 = opt_value_quantile_form(inst);
            double v2 = opt_value_order_stats(inst);
            CHECK(v1 == doctest::Approx(v2).epsilon(1e-9));
        }
    // atoms route through exact beta integrals
    Instance atoms(20, hard_instance_dist(0.0, 1.0, 3.0, 20), 0.4, 0.5);
    CHECK(opt_value_quantile_form(atoms) ==
          doctest::Approx(opt_value_order_stats(atoms)).epsilon(1e-9));
}

TEST_CASE("monte carlo benchmark") {
    Instance two(2, uniform_dist(0, 1), 0.5, 0.0);
    auto [mean, se] = opt_value_mc(two, 1000000, 42);
    CHECK(std::abs(mean - 5.0 / 12.0) < 3.0 * se);

    // point mass: payoff is min{D-1, n} exactly
    Instance pm(3, point_mass(1.0), 0.5, 0.0);
    auto [pmean, pse] = opt_value_mc(pm, 200000, 43);
    CHECK(std::abs(pmean - b_n(0.5, 1.0, 3)) < 4.0 * pse);
    CHECK(b_n(0.5, 1.0, 3) == doctest::Approx(0.875).epsilon(1e-12));

    // deterministic given the seed, independent of worker count
    auto a = opt_value_mc(two, 50000, 7, 1);
    auto b = opt_value_mc(two, 50000, 7, 4);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("benchmark monotone in zeta, antitone in p") {
    auto u = uniform_dist(0, 1);
    double prev = -1.0;
    for (double zeta : {0.0, 0.5, 1.0}) {
        double v = opt_value_quantile_form(Instance(5, u, 0.5, zeta));
        CHECK(v >= prev);
        prev = v;
    }
    prev = 1e18;
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        double v = opt_value_quantile_form(Instance(5, u, p, 0.3));
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("clairvoyant vs offline benchmark separation") {
    for (long n : {10L, 100L, 1000L}) {
        double p = 0.4;
        Instance inst(n, uniform_dist(0.0, static_cast<double>(n)), p, 0.0);
        double v_opt = opt_value_quantile_form(inst);
        double v_offline = (1.0 - p) * static_cast<double>(n) * static_cast<double>(n) / 2.0;
        CHECK(v_opt <= static_cast<double>(n) / p + 1e-9);
        CHECK(v_opt / v_offline <= 2.0 / (p * (1.0 - p) * static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("step-varying disruption rates admit no constant ratio") {
    // fixture: unit-rate exponential values with deterministic disruptions
    // every s-th step. The clairvoyant collects the top n/s order statistics
    // (harmonic sums), the best online play collects n/s mean-value items, and
    // the quotient decays like 1/log(s).
    double prev_ratio = 1.0;
    long n = 1 << 20;
    for (long s : {16L, 64L, 256L, 1024L}) {
        long m = n / s;
        // E[X_(l)] of n unit exponentials = sum_{j=l}^{n} 1/j
        double tail = 0.0;
        KahanSum top_sum;
        for (long j = n; j >= 1; --j) {
            tail += 1.0 / static_cast<double>(j);
            if (j <= m) top_sum.add(tail);
        }
        double v_opt = top_sum.value();
        double v_online = static_cast<double>(m);  // m selections at mean 1
        double ratio = v_online / v_opt;
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 0.15);
}
