#include "osud/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace osud {

double pairwise_sum(const std::vector<double>& xs) {
    // iterative pairwise reduction; order fixed by construction
    if (xs.empty()) return 0.0;
    std::vector<double> buf = xs;
    std::size_t n = buf.size();
    while (n > 1) {
        std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
        if (n % 2 == 1) {
            buf[half] = buf[n - 1];
            ++half;
        }
        n = half;
    }
    return buf[0];
}

namespace {

double simpson_panel(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void simpson_rec(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                 double m, double fm, double whole, double rel_tol, double abs_tol, int depth,
                 QuadratureResult& out) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_panel(a, fa, flm, m, fm);
    double right = simpson_panel(m, fm, frm, b, fb);
    double delta = left + right - whole;
    double tol = std::max(abs_tol, rel_tol * std::abs(left + right));
    if (depth <= 0) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        out.converged = false;
        return;
    }
    if (std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        return;
    }
    simpson_rec(f, a, fa, m, fm, lm, flm, left, rel_tol, abs_tol / 2.0, depth - 1, out);
    simpson_rec(f, m, fm, b, fb, rm, frm, right, rel_tol, abs_tol / 2.0, depth - 1, out);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int max_depth) {
    QuadratureResult out;
    if (a == b) return out;
    double fa = f(a), fb = f(b);
    double m = 0.5 * (a + b), fm = f(m);
    double whole = simpson_panel(a, fa, fm, b, fb);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, rel_tol, abs_tol, max_depth, out);
    return out;
}

namespace {

struct GaussRule {
    std::vector<double> nodes, weights;  // on [-1, 1]
};

// Nodes via Newton iteration on Legendre polynomials.
GaussRule make_gauss_rule(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double eps = 1e-15;
    int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < eps) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order,
                      int panels) {
    static thread_local int cached_order = -1;
    static thread_local GaussRule cached;
    if (order != cached_order) {
        cached = make_gauss_rule(order);
        cached_order = order;
    }
    KahanSum total;
    double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * h, mid = lo + 0.5 * h;
        for (int i = 0; i < order; ++i)
            total.add(0.5 * h * cached.weights[i] * f(mid + 0.5 * h * cached.nodes[i]));
    }
    return total.value();
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("bisect: no sign change over bracket");
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tol, int max_iter) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

double log_binom_pmf(long n, long k, double p) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return lc + k * std::log(p) + (n - k) * std::log1p(-p);
}

namespace {

// Lentz continued fraction for the incomplete beta.
double beta_cf(double x, double a, double b) {
    const double tiny = 1e-300, eps = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) * beta_cf(1.0 - x, b, a) / b;
}

double binom_tail_geq(long n, long k, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    // Pr[Bin(n,p) >= k] = I_p(k, n-k+1)
    return reg_inc_beta(p, static_cast<double>(k), static_cast<double>(n - k + 1));
}

double poisson_tail_geq(double lambda, long k) {
    if (k <= 0) return 1.0;
    if (lambda <= 0.0) return 0.0;
    // CDF up to k-1 in log-stable recurrence; complement chosen by mass location
    if (static_cast<double>(k) <= lambda) {
        // tail is close to 1: sum the (small) lower CDF
        double log_term = -lambda;  // k=0 term
        KahanSum cdf;
        cdf.add(std::exp(log_term));
        for (long j = 1; j < k; ++j) {
            log_term += std::log(lambda) - std::log(static_cast<double>(j));
            cdf.add(std::exp(log_term));
        }
        return 1.0 - std::min(1.0, cdf.value());
    }
    // k beyond the mean: sum the tail directly until negligible
    double log_term = k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
    double term = std::exp(log_term);
    KahanSum tail;
    for (long j = k; term > 0.0; ++j) {
        tail.add(term);
        term *= lambda / static_cast<double>(j + 1);
        if (term < 1e-20 * (tail.value() + 1e-300) && j > k + 10) break;
    }
    return std::min(1.0, tail.value());
}

}  // namespace osud
