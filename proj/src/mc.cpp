#include "osud/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace osud {
namespace mc {

Episode run_episode(const Instance& inst, const Policy& policy, RngStream& rng) {
    Episode ep;
    for (long i = 1; i <= inst.n; ++i) {
        auto [value, quantile] = inst.dist.sample_with_quantile(rng);
        if (!policy(i, value, quantile, rng)) continue;
        if (rng.next_bernoulli(inst.p)) {
            ep.disrupted = true;
            ep.disrupting_value = value;
            ep.payoff += inst.zeta * value;
            break;
        }
        ep.accepted_values.push_back(value);
        ep.payoff += value;
        ep.max_payoff = std::max(ep.max_payoff, value);
    }
    return ep;
}

EstimatePair estimate(const Instance& inst, const Policy& policy, long trials, std::uint64_t seed,
                      int workers) {
    if (trials < 2) throw std::invalid_argument("estimate: trials must be >= 2");
    std::vector<double> sums(static_cast<std::size_t>(trials));
    std::vector<double> maxes(static_cast<std::size_t>(trials));
    auto run_range = [&](long lo, long hi) {
        for (long t = lo; t < hi; ++t) {
            RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
            Episode ep = run_episode(inst, policy, rng);
            sums[static_cast<std::size_t>(t)] = ep.payoff;
            maxes[static_cast<std::size_t>(t)] = ep.max_payoff;
        }
    };
    if (workers <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    auto summarize = [trials](const std::vector<double>& xs) {
        Estimate est;
        est.trials = trials;
        est.mean = pairwise_sum(xs) / static_cast<double>(trials);
        std::vector<double> sq(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - est.mean) * (xs[i] - est.mean);
        double var = pairwise_sum(sq) / static_cast<double>(trials - 1);
        est.std_error = std::sqrt(var / static_cast<double>(trials));
        return est;
    };
    return {summarize(sums), summarize(maxes)};
}

Policy fixed_quantile_policy(double q) {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("fixed_quantile_policy: q outside (0,1]");
    return [q](long, double, double quantile, RngStream&) { return quantile <= q; };
}

Policy accept_all_policy() {
    return [](long, double, double, RngStream&) { return true; };
}

Policy reject_all_policy() {
    return [](long, double, double, RngStream&) { return false; };
}

}  // namespace mc
}  // namespace osud
