#include "osud/clairvoyant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace osud {
namespace clairvoyant {

double g_n(double p, double q, long n, double zeta) {
    if (q < 0.0 || q > 1.0) throw std::domain_error("g_n: q outside [0,1]");
    return static_cast<double>(n) * (1.0 - (1.0 - zeta) * p) * pow1m(p * q, n - 1);
}

double b_n(double p, double v, long n) {
    if (v < 0.0 || v > 1.0) throw std::domain_error("b_n: v outside [0,1]");
    // inner expectation over the geometric horizon is an exact finite sum:
    // E[min{k, D-1}] = (1-p)(1-(1-p)^k)/p
    KahanSum total;
    for (long k = 0; k <= n; ++k) {
        double lp = log_binom_pmf(n, k, v);
        if (lp < -745.0) continue;
        total.add(std::exp(lp) * (1.0 - p) * (1.0 - pow1m(p, k)) / p);
    }
    return total.value();
}

double opt_value_quantile_form(const Instance& inst, double* error_estimate) {
    const double recov = 1.0 - (1.0 - inst.zeta) * inst.p;
    const double p = inst.p;
    const long n = inst.n;
    KahanSum total;
    double err = 0.0;
    for (const auto& piece : inst.dist.pieces()) {
        if (piece.kind == QuantileDistribution::Piece::Kind::Atom) {
            // ∫_a^b n(1-pq)^{n-1} dq = ((1-pa)^n - (1-pb)^n)/p
            double mass_integral = (pow1m(p * piece.q_lo, n) - pow1m(p * piece.q_hi, n)) / p;
            total.add(piece.value * recov * mass_integral);
        } else {
            auto f = [&](double q) { return piece.quantile_fn(q) * g_n(p, q, n, inst.zeta); };
            auto r = adaptive_simpson(f, piece.q_lo, piece.q_hi, 1e-11, 1e-15);
            if (!r.converged && r.error_estimate > 1e-8 * (std::abs(r.value) + 1e-12))
                throw std::runtime_error(
                    "opt_value: quadrature did not converge on piece [" +
                    std::to_string(piece.q_lo) + "," + std::to_string(piece.q_hi) +
                    "], error estimate " + std::to_string(r.error_estimate));
            total.add(r.value);
            err += r.error_estimate;
        }
    }
    if (error_estimate) *error_estimate = err;
    return total.value();
}

double order_stat_mean(const QuantileDistribution& dist, long n, long j) {
    if (j < 1 || j > n) throw std::domain_error("order_stat_mean: j outside [1,n]");
    const double a = static_cast<double>(j), b = static_cast<double>(n - j + 1);
    const double log_norm = std::log(static_cast<double>(j)) + std::lgamma(n + 1.0) -
                            std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    KahanSum total;
    for (const auto& piece : dist.pieces()) {
        if (piece.kind == QuantileDistribution::Piece::Kind::Atom) {
            double w = reg_inc_beta(piece.q_hi, a, b) - reg_inc_beta(piece.q_lo, a, b);
            total.add(piece.value * w);
        } else {
            auto f = [&](double u) {
                double lw = log_norm;
                if (j > 1) lw += (j - 1) * std::log(u);
                if (n > j) lw += (n - j) * std::log1p(-u);
                if (lw < -745.0 || std::isinf(lw)) return 0.0;
                return piece.quantile_fn(u) * std::exp(lw);
            };
            // split at the beta-density peak so adaptive refinement can see it
            double mean = a / (a + b);
            double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
            std::vector<double> cuts{piece.q_lo, piece.q_hi};
            for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
                double c = mean + k * sd;
                if (c > piece.q_lo && c < piece.q_hi) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                total.add(adaptive_simpson(f, cuts[i], cuts[i + 1], 1e-11, 1e-16).value);
        }
    }
    return total.value();
}

double opt_value_order_stats(const Instance& inst) {
    KahanSum total;
    for (long j = 1; j <= inst.n; ++j) {
        double w = pow1m(inst.p, j) + inst.zeta * inst.p * pow1m(inst.p, j - 1);
        if (w < 1e-18) break;
        total.add(w * order_stat_mean(inst.dist, inst.n, j));
    }
    return total.value();
}

OptValueBreakdown opt_value(const Instance& inst) {
    OptValueBreakdown out;
    double err = 0.0;
    out.value = opt_value_quantile_form(inst, &err);
    out.quadrature_error_estimate = err;
    if (inst.n <= 64) {
        double alt = opt_value_order_stats(inst);
        double tol = std::max(1e-8 * std::max(std::abs(out.value), std::abs(alt)), 10.0 * err + 1e-12);
        if (std::abs(alt - out.value) > tol)
            throw std::runtime_error("opt_value: representations disagree: " +
                                     std::to_string(out.value) + " vs " + std::to_string(alt));
        out.by_formula = OptFormula::Both;
        out.quadrature_error_estimate = std::max(err, std::abs(alt - out.value));
    }
    return out;
}

namespace {

double mc_trial_payoff(const Instance& inst, RngStream& rng, std::vector<double>& buf) {
    long d = rng.next_geometric(inst.p);
    buf.clear();
    for (long i = 0; i < inst.n; ++i) buf.push_back(inst.dist.sample(rng));
    long keep = std::min<long>(d - 1, inst.n);
    long need = std::min<long>(d, inst.n);
    std::partial_sort(buf.begin(), buf.begin() + need, buf.end(), std::greater<double>());
    double payoff = 0.0;
    for (long i = 0; i < keep; ++i) payoff += buf[i];
    if (d <= inst.n) payoff += inst.zeta * buf[d - 1];
    return payoff;
}

}  // namespace

std::pair<double, double> opt_value_mc(const Instance& inst, long trials, std::uint64_t seed,
                                       int workers) {
    if (trials < 1) throw std::invalid_argument("opt_value_mc: trials must be >= 1");
    std::vector<double> payoffs(static_cast<std::size_t>(trials));
    auto run_range = [&](long lo, long hi) {
        std::vector<double> buf;
        buf.reserve(static_cast<std::size_t>(inst.n));
        for (long t = lo; t < hi; ++t) {
            RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
            payoffs[static_cast<std::size_t>(t)] = mc_trial_payoff(inst, rng, buf);
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
    double mean = pairwise_sum(payoffs) / static_cast<double>(trials);
    std::vector<double> sq(payoffs.size());
    for (std::size_t i = 0; i < payoffs.size(); ++i) sq[i] = (payoffs[i] - mean) * (payoffs[i] - mean);
    double var = trials > 1 ? pairwise_sum(sq) / static_cast<double>(trials - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(trials))};
}

}  // namespace clairvoyant
}  // namespace osud
