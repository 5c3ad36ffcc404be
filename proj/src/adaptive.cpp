#include "osud/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "osud/clairvoyant.hpp"

namespace osud {
namespace adaptive {

namespace {

// The segment-mass system telescopes to a first-order relation
//   G_{k+1} = G_1 - (1 - 1/n)(1 - G_k^{n/(n-1)}),   G(q) = (1-pq)^{n-1},
// because summing the segment recursions cancels every interior term.
// Running this map forward is violently ill-conditioned for large n*p (the
// endpoint G_n = (1-p)^{n-1} is exponentially small while its sensitivity to
// theta is not), so the solver instead fixes eps_n = 1 exactly and iterates
// backward,
//   G_k = ((G_{k+1} + d)/c)^{(n-1)/n},   c = (n-1)/n,  d = c - G_1,
// which is the stable direction. The scalar unknown is the offset d (its
// small absolute scale keeps the closure resolvable at the ULP level); the
// closure condition is that the backward pass reproduces G_1 = c - d
// (equivalently eps_0 = 0), and the derived value is increasing in d, so
// bisection applies. Theta is then 1/(n(1 - G_1)).
double backward_pass(long n, double p, double d, std::vector<double>* log_g) {
    const double dn = static_cast<double>(n);
    const double c = (dn - 1.0) / dn;
    const double log_g_end = (dn - 1.0) * std::log1p(-p);
    if (log_g) {
        log_g->assign(static_cast<std::size_t>(n) + 1, 0.0);
        (*log_g)[static_cast<std::size_t>(n)] = log_g_end;
    }
    double g = std::exp(log_g_end);  // harmless underflow at large n*p
    for (long k = n - 1; k >= 1; --k) {
        double h = (g + d) / c;
        if (h <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        double log_gk = c * std::log(h);
        g = std::exp(log_gk);
        if (log_g) (*log_g)[static_cast<std::size_t>(k)] = log_gk;
    }
    return g;
}

double eps_from_log_g(double log_g, long n, double p) {
    return -std::expm1(log_g / (static_cast<double>(n) - 1.0)) / p;
}

// log ∫_a^b (1-pq)^m dq by quadrature, scaled by the left endpoint so the
// integrand stays in (0,1]. The ratio (1-pq)/(1-pa) is formed directly to
// avoid cancellation between large logarithms.
double log_quad_pow(double a, double b, double m, double p) {
    double log_left = m * std::log1p(-p * a);
    double denom = 1.0 - p * a;
    auto f = [=](double q) { return std::exp(m * std::log1p(-p * (q - a) / denom)); };
    double integral = adaptive_simpson(f, a, b, 1e-13, 1e-300).value;
    return log_left + std::log(integral);
}

}  // namespace

double AdaptiveSchedule::log_normalizer(long i) const {
    if (i < 1 || i > n) throw std::domain_error("log_normalizer: step outside [1,n]");
    if (n == 1) return 0.0;
    double l_prev = log_g[i - 1], l_cur = log_g[i];
    // ∫ beta_i = theta n (G_{i-1} - G_i)
    return std::log(theta) + std::log(static_cast<double>(n)) + l_prev +
           std::log(-std::expm1(l_cur - l_prev));
}

double AdaptiveSchedule::sample_quantile(long i, RngStream& rng) const {
    if (i < 1 || i > n) throw std::domain_error("sample_quantile: step outside [1,n]");
    if (n == 1) return 1.0;
    double u = rng.next_unit();
    double l_prev = log_g[i - 1], l_cur = log_g[i];
    // G(q) = G_{i-1} - u (G_{i-1} - G_i), then q from G
    double log_gq = l_prev + std::log1p(u * std::expm1(l_cur - l_prev));
    return std::clamp(eps_from_log_g(log_gq, n, p), breakpoints[i - 1], breakpoints[i]);
}

AdaptiveSchedule::Residuals AdaptiveSchedule::residuals() const {
    Residuals res;
    if (n == 1) return res;
    const double dn = static_cast<double>(n);
    double log_coeff = std::log(theta) + std::log(dn) + std::log(dn - 1.0) + std::log(p);
    res.first_segment = std::abs(
        std::exp(log_coeff + log_quad_pow(0.0, breakpoints[1], dn - 2.0, p)) - 1.0);
    for (long i = 1; i < n; ++i) {
        double log_lhs = log_coeff + log_quad_pow(breakpoints[i], breakpoints[i + 1], dn - 2.0, p);
        double log_rhs = log_coeff + log_quad_pow(breakpoints[i - 1], breakpoints[i], dn - 1.0, p);
        res.recursion_max = std::max(res.recursion_max, std::abs(std::expm1(log_lhs - log_rhs)));
    }
    return res;
}

AdaptiveSchedule solve_schedule(long n, double p, double zeta) {
    return solve_schedule(n, p, zeta, 1e-3, 10.0);
}

AdaptiveSchedule solve_schedule(long n, double p, double zeta, double theta_lo, double theta_hi) {
    if (n < 1) throw std::invalid_argument("solve_schedule: n must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("solve_schedule: p outside (0,1)");
    AdaptiveSchedule schedule;
    schedule.n = n;
    schedule.p = p;
    schedule.zeta = zeta;
    if (n == 1) {
        schedule.theta = 1.0;
        schedule.breakpoints = {0.0, 1.0};
        schedule.log_g = {0.0, 0.0};
        return schedule;
    }
    const double dn = static_cast<double>(n);
    const double c = (dn - 1.0) / dn;
    // closure residual; increasing in d
    auto residual = [&](double d) {
        double derived = backward_pass(n, p, d, nullptr);
        if (std::isnan(derived)) return -1.0;  // d too negative
        return derived - (c - d);
    };
    // theta increasing in G_1 = c - d, hence decreasing in d
    auto d_of_theta = [&](double theta) { return c - (1.0 - 1.0 / (dn * theta)); };
    double lo = d_of_theta(theta_hi);
    double hi = std::min(c, d_of_theta(theta_lo));
    int guard = 0;
    while (residual(lo) > 0.0 && ++guard < 200) lo -= std::max(std::abs(lo), 1.0 / dn);
    guard = 0;
    while (residual(hi) < 0.0 && ++guard < 200) hi = 0.5 * (hi + c);
    if (residual(lo) > 0.0 || residual(hi) < 0.0)
        throw std::runtime_error("solve_schedule: could not bracket the normalization");
    for (int iter = 0; iter < 200 && hi - lo > 1e-22; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (residual(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double d = 0.5 * (lo + hi);
    if (std::isnan(backward_pass(n, p, d, &schedule.log_g)))
        throw std::runtime_error("solve_schedule: final pass failed");
    double g1 = c - d;
    schedule.theta = 1.0 / (dn * (1.0 - g1));
    schedule.log_g[1] = std::log(g1);
    schedule.breakpoints.resize(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i)
        schedule.breakpoints[static_cast<std::size_t>(i)] =
            eps_from_log_g(schedule.log_g[static_cast<std::size_t>(i)], n, p);
    schedule.breakpoints[0] = 0.0;
    schedule.breakpoints[static_cast<std::size_t>(n)] = 1.0;
    return schedule;
}

double alg_value(const Instance& inst, const AdaptiveSchedule& schedule) {
    if (schedule.n != inst.n || std::abs(schedule.p - inst.p) > 1e-12 ||
        std::abs(schedule.zeta - inst.zeta) > 1e-12)
        throw std::invalid_argument("alg_value: schedule does not match instance");
    double v_opt = clairvoyant::opt_value_quantile_form(inst);
    if (inst.n == 1) return v_opt;
    double recov = 1.0 - (1.0 - inst.zeta) * inst.p;
    double leak = static_cast<double>(inst.n) * recov * pow1m(inst.p, inst.n - 1) * inst.dist.mean();
    return schedule.theta * (v_opt - leak);
}

double guarantee(long n, double p) {
    if (n < 2) throw std::domain_error("guarantee: n must be >= 2");
    AdaptiveSchedule schedule = solve_schedule(n, p, 0.0);
    double dn = static_cast<double>(n);
    double factor = 1.0 - pow1m(p, n - 1) * p * dn / (1.0 - pow1m(p, n));
    return schedule.theta * factor;
}

mc::Policy make_policy(const AdaptiveSchedule& schedule) {
    return [schedule](long step, double, double quantile, RngStream& rng) {
        return quantile <= schedule.sample_quantile(step, rng);
    };
}

}  // namespace adaptive
}  // namespace osud
