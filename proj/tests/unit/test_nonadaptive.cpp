#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "osud/clairvoyant.hpp"
#include "osud/nonadaptive.hpp"

using namespace osud;
using namespace osud::nonadaptive;

TEST_CASE("optimal quantile") {
    CHECK(optimal_quantile(4, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(optimal_quantile(1, 0.7) == 1.0);
    CHECK(optimal_quantile(10, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("fixed-quantile value on uniform instances") {
    CHECK(alg_value(Instance(1, uniform_dist(0, 1), 0.5, 0.0), 1.0) ==
          doctest::Approx(0.25).epsilon(1e-12));
    // accept-all with two draws: (1-p)E + (1-p)^2 E via survival chain
    CHECK(alg_value(Instance(2, uniform_dist(0, 1), 0.5, 0.0), 1.0) ==
          doctest::Approx(0.375).epsilon(1e-12));
    CHECK(alg_value(Instance(1, uniform_dist(0, 1), 0.5, 1.0), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(alg_value(Instance(2, uniform_dist(0, 1), 0.5, 0.0), 0.0), std::domain_error);
}

TEST_CASE("eta bound values and limit") {
    CHECK(eta_bound(1, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eta_bound(2, 0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    long n = 2000000;
    double q = optimal_quantile(n, 0.5);
    CHECK(eta_bound(n, 0.5, q) == doctest::Approx(kOneMinusInvE).epsilon(1e-5));
}

TEST_CASE("rare disruption bound") {
    CHECK(rare_disruption_bound(1.0) == doctest::Approx(kOneMinusInvE).epsilon(1e-14));
    CHECK(rare_disruption_bound(1e-8) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(rare_disruption_bound(0.5) == doctest::Approx(0.786938680574733).epsilon(1e-12));
}

TEST_CASE("guarantee holds with atoms and recovery") {
    std::vector<QuantileDistribution> dists;
    dists.push_back(uniform_dist(0, 1));
    dists.push_back(from_atoms({{2.0, 0.3}, {0.5, 0.4}, {0.0, 0.3}}, "mixed"));
    dists.push_back(truncated_exponential(2.0, 3.0));
    for (const auto& d : dists)
        for (long n : {1L, 3L, 17L})
            for (double p : {0.2, 0.8})
                for (double zeta : {0.0, 0.5, 1.0}) {
                    auto report = make_report(Instance(n, d, p, zeta));
                    CHECK(report.ratio >= report.eta_bound - 1e-9);
                    CHECK(report.eta_bound >= kOneMinusInvE - 1e-12);
                }
}

TEST_CASE("eta bound ignores recovery while measured ratios clear it") {
    // same q, same eta; ratios at zeta in {0, .5, 1} all clear the bound
    long n = 6;
    double p = 0.4;
    double q = optimal_quantile(n, p);
    double eta = eta_bound(n, p, q);
    for (double zeta : {0.0, 0.5, 1.0}) {
        Instance inst(n, uniform_dist(0, 1), p, zeta);
        double ratio = alg_value(inst, q) / clairvoyant::opt_value_quantile_form(inst);
        CHECK(ratio >= eta - 1e-9);
    }
}

TEST_CASE("per-order-count ratio term is nondecreasing") {
    // v / (sum_i p(1-p)^{i-1} sum_{j<i} Pr[Bin(n,v)>=j] + (1-p)^n n v)
    for (long n : {3L, 10L, 50L})
        for (double p : {0.2, 0.7}) {
            double prev = 0.0;
            bool first = true;
            for (int k = 1; k <= 60; ++k) {
                double v = static_cast<double>(k) / 60.0;
                double denom = 0.0;
                for (long i = 2; i <= n; ++i) {
                    double w = p * pow1m(p, i - 1);
                    for (long j = 1; j < i; ++j) denom += w * binom_tail_geq(n, j, v);
                }
                denom += pow1m(p, n) * static_cast<double>(n) * v;
                double ratio = v / denom;
                if (!first) CHECK(ratio >= prev - 1e-10);
                prev = ratio;
                first = false;
            }
        }
}

TEST_CASE("spike-plus-plateau critical point and ratio") {
    // a2 = p(e-2)a1 forces the critical point to 1/p
    double p = 0.5;
    auto report = hard_instance_report(1.0, p * (M_E - 2.0), 200.0, p, 100000);
    CHECK(report.lambda_found);
    CHECK(report.lambda_star == doctest::Approx(1.0 / p).epsilon(1e-9));
    CHECK(report.ratio <= kOneMinusInvE + 0.01);
    CHECK(report.ratio >= kOneMinusInvE - 0.002);

    // spike only: the best policy just waits for the spike
    auto spike = hard_instance_report(1.0, 0.0, 5.0, 0.3, 10000);
    CHECK(spike.ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hard-instance closed forms match the explicit distribution") {
    // the report works off the limiting series; the distribution object must
    // reproduce it through the generic machinery at large n
    double p = 0.5, a1 = 1.0, a2 = p * (M_E - 2.0), beta = 20.0;
    long n = 20000;
    auto report = hard_instance_report(a1, a2, beta, p, n);
    Instance inst(n, hard_instance_dist(a1, a2, beta, n), p, 0.0);
    double opt_dist = clairvoyant::opt_value_quantile_form(inst);
    CHECK(opt_dist == doctest::Approx(report.opt_value).epsilon(2e-3));

    double best = 0.0;
    for (int k = 0; k <= 400; ++k) {
        double lam = 1e-3 * std::pow(beta / 1e-3, k / 400.0);
        best = std::max(best, alg_value(inst, lam / static_cast<double>(n)));
    }
    CHECK(best == doctest::Approx(report.alg_sup_value).epsilon(2e-3));
    CHECK(best / opt_dist <= kOneMinusInvE + 0.01);
}
