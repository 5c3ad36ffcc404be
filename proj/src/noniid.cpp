#include "osud/noniid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace osud {
namespace noniid {

void NonIIDInstance::validate() const {
    if (dists.empty()) throw std::invalid_argument("non-iid instance: no distributions");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("non-iid instance: p outside (0,1)");
    if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("non-iid instance: zeta outside [0,1]");
}

OptProbEstimate estimate_opt_probs(const NonIIDInstance& inst, long trials, std::uint64_t seed,
                                   int workers) {
    inst.validate();
    if (trials < 1) throw std::invalid_argument("estimate_opt_probs: trials must be >= 1");
    const long n = inst.n();
    std::vector<double> payoffs(static_cast<std::size_t>(trials));
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(std::max(workers, 1)),
                                          std::vector<long>(static_cast<std::size_t>(n), 0));
    auto run_range = [&](int worker, long lo, long hi) {
        std::vector<std::pair<double, long>> order(static_cast<std::size_t>(n));
        auto& my_counts = counts[static_cast<std::size_t>(worker)];
        for (long t = lo; t < hi; ++t) {
            RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
            long d = rng.next_geometric(inst.p);
            for (long i = 0; i < n; ++i)
                order[static_cast<std::size_t>(i)] = {
                    inst.dists[static_cast<std::size_t>(i)].sample(rng), i};
            std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
                return a.first > b.first;
            });
            long attempts = std::min<long>(d, n);
            double payoff = 0.0;
            for (long r = 0; r < attempts; ++r) {
                my_counts[static_cast<std::size_t>(order[static_cast<std::size_t>(r)].second)]++;
                bool disrupting = (r == d - 1);
                payoff += (disrupting ? inst.zeta : 1.0) * order[static_cast<std::size_t>(r)].first;
            }
            payoffs[static_cast<std::size_t>(t)] = payoff;
        }
    };
    if (workers <= 1) {
        run_range(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    OptProbEstimate out;
    out.trials = trials;
    out.z.assign(static_cast<std::size_t>(n), 0.0);
    out.z_stderr.assign(static_cast<std::size_t>(n), 0.0);
    for (long i = 0; i < n; ++i) {
        long total = 0;
        for (const auto& c : counts) total += c[static_cast<std::size_t>(i)];
        double z = static_cast<double>(total) / static_cast<double>(trials);
        out.z[static_cast<std::size_t>(i)] = z;
        out.z_stderr[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(z * (1.0 - z), 0.0) / static_cast<double>(trials));
    }
    out.opt_value = pairwise_sum(payoffs) / static_cast<double>(trials);
    std::vector<double> sq(payoffs.size());
    for (std::size_t i = 0; i < payoffs.size(); ++i)
        sq[i] = (payoffs[i] - out.opt_value) * (payoffs[i] - out.opt_value);
    if (trials > 1)
        out.opt_stderr = std::sqrt(pairwise_sum(sq) / static_cast<double>(trials - 1) /
                                   static_cast<double>(trials));
    return out;
}

SkippingSchedule build_schedule(const NonIIDInstance& inst, const std::vector<double>& z) {
    inst.validate();
    const long n = inst.n();
    if (z.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("build_schedule: z size != n");
    SkippingSchedule schedule;
    schedule.z = z;
    schedule.tau.resize(z.size());
    schedule.eps.resize(z.size());
    schedule.reach.resize(z.size());
    double prefix = 0.0;
    for (long i = 0; i < n; ++i) {
        double zi = z[static_cast<std::size_t>(i)];
        if (zi < 0.0 || zi > 1.0) throw std::invalid_argument("build_schedule: z outside [0,1]");
        if (prefix > 1.0 / inst.p + 1e-12)
            throw std::invalid_argument("build_schedule: z prefix sums exceed the 1/p budget");
        schedule.reach[static_cast<std::size_t>(i)] = 1.0 - 0.5 * inst.p * prefix;
        schedule.eps[static_cast<std::size_t>(i)] = 1.0 - 1.0 / (2.0 - inst.p * prefix);
        schedule.tau[static_cast<std::size_t>(i)] =
            zi > 0.0 ? inst.dists[static_cast<std::size_t>(i)].inverse_cdf(zi)
                     : std::numeric_limits<double>::infinity();
        prefix += zi;
    }
    return schedule;
}

PolicyEstimate policy_value(const NonIIDInstance& inst, const SkippingSchedule& schedule,
                            long trials, std::uint64_t seed, int workers) {
    inst.validate();
    const long n = inst.n();
    if (schedule.z.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("policy_value: schedule does not match instance");
    if (trials < 2) throw std::invalid_argument("policy_value: trials must be >= 2");
    std::vector<double> payoffs(static_cast<std::size_t>(trials));
    auto run_range = [&](long lo, long hi) {
        for (long t = lo; t < hi; ++t) {
            RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
            double payoff = 0.0;
            for (long i = 0; i < n; ++i) {
                auto [value, quantile] =
                    inst.dists[static_cast<std::size_t>(i)].sample_with_quantile(rng);
                bool skip = rng.next_unit() < schedule.eps[static_cast<std::size_t>(i)];
                if (skip) continue;
                if (quantile > schedule.z[static_cast<std::size_t>(i)]) continue;
                if (rng.next_bernoulli(inst.p)) {
                    payoff += inst.zeta * value;
                    break;
                }
                payoff += value;
            }
            payoffs[static_cast<std::size_t>(t)] = payoff;
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
    PolicyEstimate out;
    out.trials = trials;
    out.mean = pairwise_sum(payoffs) / static_cast<double>(trials);
    std::vector<double> sq(payoffs.size());
    for (std::size_t i = 0; i < payoffs.size(); ++i)
        sq[i] = (payoffs[i] - out.mean) * (payoffs[i] - out.mean);
    out.std_error = std::sqrt(pairwise_sum(sq) / static_cast<double>(trials - 1) /
                              static_cast<double>(trials));
    return out;
}

TightInstance tight_instance(long n, double eps_param, double p, double zeta) {
    if (n < 2) throw std::invalid_argument("tight_instance: n must be >= 2");
    if (!(eps_param > 0.0 && eps_param < p))
        throw std::invalid_argument("tight_instance: need 0 < eps < p");
    TightInstance out;
    out.instance.p = p;
    out.instance.zeta = zeta;
    out.instance.dists.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i + 1 < n; ++i) out.instance.dists.push_back(point_mass(p - eps_param));
    out.instance.dists.push_back(
        from_atoms({{1.0 / eps_param, eps_param}, {0.0, 1.0 - eps_param}}, "longshot"));
    double recov = 1.0 - (1.0 - zeta) * p;
    out.alg_value = recov;
    out.opt_value = recov * (1.0 + (p - eps_param) * (1.0 - eps_param * p) / p *
                                       (1.0 - pow1m(p, n - 1)));
    return out;
}

}  // namespace noniid
}  // namespace osud
