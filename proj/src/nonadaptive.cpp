#include "osud/nonadaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "osud/clairvoyant.hpp"

namespace osud {
namespace nonadaptive {

double optimal_quantile(long n, double p) {
    if (n < 1 || !(p > 0.0 && p < 1.0)) throw std::domain_error("optimal_quantile: bad (n,p)");
    return std::min(1.0, 1.0 / (p * static_cast<double>(n)));
}

double a_n(double q, double p, long n) {
    return (1.0 - p) * (1.0 - pow1m(q * p, n)) / p;
}

double alg_value(const Instance& inst, double q) {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("alg_value: q outside (0,1]");
    double accept_term = 1.0 - pow1m(q * inst.p, inst.n);
    double coeff = a_n(q, inst.p, inst.n) + inst.zeta * accept_term;
    return coeff * inst.dist.partial_expectation(q) / q;
}

double eta_bound(long n, double p, double q) {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("eta_bound: q outside (0,1]");
    double lead = (1.0 - pow1m(q * p, n)) / p;
    double opt_selections = (1.0 - pow1m(p, n)) / p;  // E[min{D-1,n}]/(1-p)
    return lead * std::min(1.0 / opt_selections, 1.0 / (q * static_cast<double>(n)));
}

double rare_disruption_bound(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("rare_disruption_bound: alpha outside (0,1]");
    return -std::expm1(-alpha) / alpha;
}

NonAdaptiveReport make_report(const Instance& inst) {
    NonAdaptiveReport report;
    report.q = optimal_quantile(inst.n, inst.p);
    report.alg_value = alg_value(inst, report.q);
    report.opt_value = clairvoyant::opt_value_quantile_form(inst);
    report.ratio = report.alg_value / report.opt_value;
    report.eta_bound = eta_bound(inst.n, inst.p, report.q);
    return report;
}

HardInstanceReport hard_instance_report(double a1, double a2, double beta, double p, long n) {
    if (beta > static_cast<double>(n)) throw std::invalid_argument("hard_instance_report: beta > n");
    if (a1 < 0.0 || a2 < 0.0) throw std::invalid_argument("hard_instance_report: negative weights");
    HardInstanceReport report;
    const double dn = static_cast<double>(n);

    // benchmark: a1(1-p) + a2 * sum_j Pr[Poisson(beta) >= j](1-p)^j
    {
        KahanSum series;
        double tail_weight = 1.0 - p;
        for (long j = 1; j < 100000; ++j) {
            double term = poisson_tail_geq(beta, j) * tail_weight;
            series.add(term);
            tail_weight *= 1.0 - p;
            if (tail_weight / p < 1e-16 * (series.value() + 1e-300)) break;
        }
        report.opt_value = a1 * (1.0 - p) + a2 * series.value();
    }

    // critical point of e^{-lp}(a1 + a1 p l + a2 p l^2) = a1, evaluated in the
    // lambda^2-normalized form so the root is resolvable near the origin
    auto crit = [a1, a2, p](double l) {
        double x = p * l;
        double h = x < 1e-3 ? x * x * (0.5 - x / 3.0 + x * x / 8.0)
                            : 1.0 - (1.0 + x) * std::exp(-x);
        return a2 * p * std::exp(-x) - a1 * h / (l * l);
    };
    double scan_hi = std::max(beta, 4.0 / p);
    double prev_l = 1e-9, prev_f = crit(prev_l);
    for (int k = 1; k <= 64; ++k) {
        double l = 1e-9 * std::pow(scan_hi / 1e-9, k / 64.0);
        double f = crit(l);
        if ((prev_f > 0.0) != (f > 0.0)) {
            report.lambda_star = bisect(crit, prev_l, l, 1e-12);
            report.lambda_found = true;
            break;
        }
        prev_l = l;
        prev_f = f;
    }

    auto value_at = [&](double l) {
        if (l <= 0.0) return (1.0 - p) * a1;
        double accept = -std::expm1(dn * std::log1p(-l * p / dn));
        return (1.0 - p) / p * accept * (a1 + a2 * std::min(l, beta)) / l;
    };
    double best = value_at(0.0);
    if (report.lambda_found && report.lambda_star <= beta)
        best = std::max(best, value_at(report.lambda_star));
    best = std::max(best, value_at(beta));
    // coarse scan over both branches as a safety net
    for (int k = 1; k <= 256; ++k) {
        double l = 1e-6 * std::pow(dn / 1e-6, k / 256.0);
        best = std::max(best, value_at(l));
    }
    report.alg_sup_value = best;
    report.ratio = report.alg_sup_value / report.opt_value;
    return report;
}

}  // namespace nonadaptive
}  // namespace osud
