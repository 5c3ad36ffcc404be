#include "osud/maxvariant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "osud/clairvoyant.hpp"

namespace osud {
namespace maxvariant {

double episode_max_payoff(const mc::Episode& episode, CountingMode mode) {
    double value = episode.max_payoff;
    if (mode == CountingMode::IncludeDisruptor && episode.disrupting_value)
        value = std::max(value, *episode.disrupting_value);
    return value;
}

double opt_value_max(const Instance& inst) {
    return (1.0 - inst.p) * clairvoyant::order_stat_mean(inst.dist, inst.n, 1);
}

double conditional_max(const QuantileDistribution& dist, double q, long l) {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("conditional_max: q outside (0,1]");
    if (l < 0) throw std::domain_error("conditional_max: negative count");
    if (l == 0) return 0.0;
    const double log_q = std::log(q);
    KahanSum total;
    for (const auto& piece : dist.pieces()) {
        if (piece.q_lo >= q) break;
        double hi = std::min(piece.q_hi, q);
        if (piece.kind == QuantileDistribution::Piece::Kind::Atom) {
            auto weight = [&](double w) {  // ((q - w)/q)^l
                if (w >= q) return 0.0;
                return std::exp(l * (std::log(q - w) - log_q));
            };
            total.add(piece.value * (weight(piece.q_lo) - weight(hi)));
        } else {
            auto f = [&](double w) {
                if (w >= q) return 0.0;
                double lw = std::log(static_cast<double>(l)) - l * log_q;
                if (l > 1) lw += (l - 1) * std::log(q - w);
                if (lw < -745.0) return 0.0;
                return piece.quantile_fn(w) * std::exp(lw);
            };
            total.add(adaptive_simpson(f, piece.q_lo, hi, 1e-11, 1e-16).value);
        }
    }
    return total.value();
}

double alg_value_max(const Instance& inst, double q) {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("alg_value_max: q outside (0,1]");
    const long n = inst.n;
    const double p = inst.p;
    // mu_k stabilizes once the geometric weight is negligible
    long cap = std::min<long>(n, static_cast<long>(std::ceil(std::log(1e-18) / std::log1p(-p))) + 1);
    std::vector<double> mu(static_cast<std::size_t>(cap) + 1, 0.0);
    for (long l = 1; l <= cap; ++l) mu[static_cast<std::size_t>(l)] = conditional_max(inst.dist, q, l);
    auto mu_at = [&](long l) { return mu[static_cast<std::size_t>(std::min(l, cap))]; };
    KahanSum total;
    double series = 0.0;  // sum_{k=0}^{a-1} p(1-p)^k mu_k, built incrementally
    for (long a = 0; a <= n; ++a) {
        if (a > 0) series += p * pow1m(p, a - 1) * mu_at(a - 1);
        double lpmf = log_binom_pmf(n, a, q);
        if (lpmf < -745.0) continue;
        total.add(std::exp(lpmf) * (series + pow1m(p, a) * mu_at(a)));
    }
    return total.value();
}

namespace {

// W(v) and W'(v): the per-quantile payoff kernel of the fixed-quantile
// policy under the largest-value objective.
double w_kernel_deriv(double v, double q, double p, long n) {
    double s = v / q;
    double denom = p + (1.0 - p) * s;
    double a = (1.0 - p) * s / denom;
    double a_prime = (1.0 - p) * p / (q * denom * denom);
    double base = q * p + (1.0 - p) * v;
    double b = 1.0 - pow1m(base, n);
    double b_prime = static_cast<double>(n) * (1.0 - p) * pow1m(base, n - 1);
    return a_prime * b + a * b_prime;
}

}  // namespace

double alg_value_max_integral(const Instance& inst, double q) {
    if (inst.dist.has_atoms())
        throw std::invalid_argument("alg_value_max_integral: requires a smooth distribution");
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("alg_value_max_integral: q outside (0,1]");
    KahanSum total;
    for (const auto& piece : inst.dist.pieces()) {
        if (piece.q_lo >= q) break;
        double hi = std::min(piece.q_hi, q);
        auto f = [&](double v) { return w_kernel_deriv(v, q, inst.p, inst.n) * piece.quantile_fn(v); };
        total.add(adaptive_simpson(f, piece.q_lo, hi, 1e-11, 1e-15).value);
    }
    return total.value();
}

MaxBoundResult cr_lower_bound_max(long n, double p) {
    if (n < 1 || !(p > 0.0 && p < 1.0)) throw std::domain_error("cr_lower_bound_max: bad (n,p)");
    const double dn = static_cast<double>(n);
    auto h1 = [&](double l) { return (1.0 - pow1m(l * p / dn, n)) / (p * l); };
    auto h2 = [&](double l) { return 1.0 - pow1m(l / dn, n); };
    MaxBoundResult out;
    double lo = 1e-9, hi = dn;
    if (h1(hi) - h2(hi) >= 0.0) {
        out.lambda = hi;  // branches never cross: accept-all end is binding
    } else {
        out.lambda = bisect([&](double l) { return h1(l) - h2(l); }, lo, hi, 1e-12);
    }
    out.bound = std::min(h1(out.lambda), h2(out.lambda));
    return out;
}

double hard_instance_objective(double t, double a1, double a2, double p) {
    if (t <= 0.0) return (1.0 - p) * a1;
    return (1.0 - p) * (a2 * (-std::expm1(-t)) + a1 / p * (-std::expm1(-p * t)) / t);
}

MaxHardReport hard_instance_max(double a1, double a2, double beta, double p, long n) {
    if (beta > static_cast<double>(n)) throw std::invalid_argument("hard_instance_max: beta > n");
    if (a1 < 0.0 || a2 < 0.0 || (a1 == 0.0 && a2 == 0.0))
        throw std::invalid_argument("hard_instance_max: bad weights");
    MaxHardReport report;
    report.opt = (1.0 - p) * (a1 + a2 * (-std::expm1(-beta)));

    auto branch1 = [&](double t) { return hard_instance_objective(t, a1, a2, p); };
    auto [t1, v1] = golden_max(branch1, 1e-10, beta, 1e-12);
    double best = std::max({v1, branch1(0.0), branch1(beta)});
    double t_best = v1 >= branch1(0.0) ? t1 : 0.0;

    double branch2_hi = std::min(std::max(beta, 2.0 / p), static_cast<double>(n));
    if (branch2_hi > beta) {
        auto branch2 = [&](double t) {
            double e = std::exp(-(p * t + (1.0 - p) * beta));
            double frac = p / (p + (1.0 - p) * beta / t);
            return a1 * (1.0 - p) / p * (-std::expm1(-p * t)) / t +
                   a2 * (1.0 - frac * (1.0 - e) - e);
        };
        auto [t2, v2] = golden_max(branch2, beta, branch2_hi, 1e-12);
        v2 = std::max(v2, branch2(branch2_hi));
        if (v2 > best) {
            best = v2;
            t_best = t2;
        }
    }
    report.alg_sup = best;
    report.t_star = t_best;
    report.ratio = report.alg_sup / report.opt;
    return report;
}

double ratio_curve(double v, double q, double p, long n) {
    if (!(v > 0.0) || v > q || q > 1.0) throw std::domain_error("ratio_curve: need 0 < v <= q <= 1");
    double s = v / q;
    double lead = s / (p + (1.0 - p) * s);
    double num = 1.0 - pow1m(q * p + (1.0 - p) * v, n);
    double den = 1.0 - pow1m(v, n);
    return lead * num / den;
}

MaxVariantReport make_report(const Instance& inst, double q) {
    MaxVariantReport report;
    report.q = q;
    report.alg_value = alg_value_max(inst, q);
    report.opt_value = opt_value_max(inst);
    report.ratio = report.alg_value / report.opt_value;
    double dn = static_cast<double>(inst.n);
    report.lower_bound = std::min((1.0 - pow1m(q * inst.p, inst.n)) / (dn * inst.p * q),
                                  1.0 - pow1m(q, inst.n));
    return report;
}

}  // namespace maxvariant
}  // namespace osud
