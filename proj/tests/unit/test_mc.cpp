#include <doctest.h>

#include <cmath>
#include <vector>

#include "osud/mc.hpp"
#include "osud/nonadaptive.hpp"

using namespace osud;

TEST_CASE("reject-all never pays and never disrupts") {
    Instance inst(10, uniform_dist(0, 1), 0.5, 0.7);
    RngStream rng(1);
    auto ep = mc::run_episode(inst, mc::reject_all_policy(), rng);
    CHECK(ep.payoff == 0.0);
    CHECK(ep.max_payoff == 0.0);
    CHECK_FALSE(ep.disrupted);
    CHECK_FALSE(ep.disrupting_value.has_value());
}

TEST_CASE("accept-all on a point mass follows the geometric law") {
    const double p = 0.5, zeta = 0.5;
    const long n = 3;
    Instance inst(n, point_mass(1.0), p, zeta);
    // payoff takes values {0.5, 1.5, 2.5, 3} w.p. {p, p(1-p), p(1-p)^2, (1-p)^3}
    const std::vector<double> levels{0.5, 1.5, 2.5, 3.0};
    const std::vector<double> probs{p, p * (1 - p), p * (1 - p) * (1 - p),
                                    (1 - p) * (1 - p) * (1 - p)};
    const long trials = 200000;
    std::vector<long> hits(levels.size(), 0);
    for (long t = 0; t < trials; ++t) {
        RngStream rng = derive_stream(99, t);
        auto ep = mc::run_episode(inst, mc::accept_all_policy(), rng);
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (std::abs(ep.payoff - levels[i]) < 1e-12) ++hits[i];
        if (ep.disrupted) {
            CHECK(ep.disrupting_value.has_value());
            CHECK(ep.payoff ==
                  doctest::Approx(static_cast<double>(ep.accepted_values.size()) + zeta));
        }
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        double freq = static_cast<double>(hits[i]) / trials;
        double sigma = std::sqrt(probs[i] * (1.0 - probs[i]) / trials);
        CHECK(std::abs(freq - probs[i]) < 4.0 * sigma);
    }
}

TEST_CASE("without disruptions the payoff is the plain sum") {
    Instance inst(12, uniform_dist(0, 1), 1e-12, 0.8);
    for (long t = 0; t < 100; ++t) {
        RngStream rng = derive_stream(321, t);
        auto ep = mc::run_episode(inst, mc::accept_all_policy(), rng);
        CHECK_FALSE(ep.disrupted);
        CHECK(ep.accepted_values.size() == 12);
        double sum = 0.0;
        for (double v : ep.accepted_values) sum += v;
        CHECK(ep.payoff == doctest::Approx(sum).epsilon(1e-14));
    }
}

TEST_CASE("estimate matches the fixed-quantile closed form") {
    Instance inst(5, uniform_dist(0, 1), 0.3, 0.5);
    double q = 0.4;
    auto est = mc::estimate(inst, mc::fixed_quantile_policy(q), 200000, 4242);
    double exact = nonadaptive::alg_value(inst, q);
    CHECK(std::abs(est.sum_objective.mean - exact) < 4.0 * est.sum_objective.std_error);
    CHECK(est.sum_objective.std_error > 0.0);

    // atoms with randomized tie-breaking: a quantile threshold strictly
    // inside an atom still accepts exactly mass q
    Instance atoms(6, hard_instance_dist(1.0, 0.1, 3.0, 6), 0.4, 0.5);
    double q_inside = 0.2;  // splits the plateau atom
    auto est2 = mc::estimate(atoms, mc::fixed_quantile_policy(q_inside), 200000, 4243);
    double exact2 = nonadaptive::alg_value(atoms, q_inside);
    CHECK(std::abs(est2.sum_objective.mean - exact2) < 4.0 * est2.sum_objective.std_error);
}

TEST_CASE("standard error scales like 1/sqrt(trials)") {
    Instance inst(4, uniform_dist(0, 1), 0.4, 0.0);
    auto policy = mc::fixed_quantile_policy(0.5);
    auto small = mc::estimate(inst, policy, 10000, 5);
    auto large = mc::estimate(inst, policy, 40000, 5);
    double shrink = small.sum_objective.std_error / large.sum_objective.std_error;
    CHECK(shrink > 1.6);
    CHECK(shrink < 2.4);
}

TEST_CASE("estimates are identical across worker counts") {
    Instance inst(8, truncated_exponential(1.0, 5.0), 0.5, 0.2);
    auto policy = mc::fixed_quantile_policy(0.25);
    auto ref = mc::estimate(inst, policy, 60000, 77, 1);
    for (int workers : {2, 4, 16}) {
        auto est = mc::estimate(inst, policy, 60000, 77, workers);
        CHECK(est.sum_objective.mean == ref.sum_objective.mean);
        CHECK(est.sum_objective.std_error == ref.sum_objective.std_error);
        CHECK(est.max_objective.mean == ref.max_objective.mean);
    }
}

TEST_CASE("policies observe values strictly one at a time") {
    Instance inst(20, uniform_dist(0, 1), 0.2, 0.0);
    long last_step = 0;
    auto probe = [&last_step](long step, double value, double quantile, RngStream&) {
        CHECK(step == last_step + 1);  // sequential, no lookahead possible
        CHECK(value >= 0.0);
        CHECK(quantile > 0.0);
        CHECK(quantile <= 1.0);
        last_step = step;
        return false;
    };
    RngStream rng(3);
    mc::run_episode(inst, probe, rng);
    CHECK(last_step == 20);
}
