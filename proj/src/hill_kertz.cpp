#include "osud/hill_kertz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osud {

namespace {

constexpr double kYFloor = 1e-10;

double ode_rhs(double y, double beta_minus_one) {
    // y' = y(ln y - 1) - (beta - 1) = -(y - y ln y + beta - 1)
    if (y <= 0.0) return -beta_minus_one;
    return y * (std::log(y) - 1.0) - beta_minus_one;
}

}  // namespace

OdeSolution::OdeSolution(double theta, std::vector<double> grid, std::vector<double> values,
                         bool hit_floor, double t_floor)
    : theta_(theta),
      grid_(std::move(grid)),
      values_(std::move(values)),
      hit_floor_(hit_floor),
      t_floor_(t_floor) {
    if (grid_.size() != values_.size() || grid_.size() < 2)
        throw std::invalid_argument("OdeSolution: malformed table");
    cum_neg_inv_deriv_.resize(grid_.size(), 0.0);
    double bm1 = 1.0 / theta_ - 1.0;
    KahanSum acc;
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        double h = grid_[k] - grid_[k - 1];
        double y0 = values_[k - 1], y1 = values_[k];
        double d0 = ode_rhs(y0, bm1), d1 = ode_rhs(y1, bm1);
        // Hermite midpoint, then Simpson on -1/y'
        double ym = 0.5 * (y0 + y1) + 0.125 * h * (d0 - d1);
        double dm = ode_rhs(ym, bm1);
        acc.add(h / 6.0 * (-1.0 / d0 - 4.0 / dm - 1.0 / d1));
        cum_neg_inv_deriv_[k] = acc.value();
    }
}

double OdeSolution::rhs(double y) const { return ode_rhs(y, 1.0 / theta_ - 1.0); }

double OdeSolution::y_at(double t) const {
    if (t <= grid_.front()) return values_.front();
    if (t >= grid_.back()) return values_.back();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    double t0 = grid_[k - 1], t1 = grid_[k];
    double h = t1 - t0, s = (t - t0) / h;
    double y0 = values_[k - 1], y1 = values_[k];
    double d0 = rhs(y0), d1 = rhs(y1);
    double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    double h10 = s * (1.0 - s) * (1.0 - s);
    double h01 = s * s * (3.0 - 2.0 * s);
    double h11 = s * s * (s - 1.0);
    double y = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    return std::max(y, 0.0);
}

double OdeSolution::inverse(double v) const {
    double lo_v = values_.back(), hi_v = values_.front();
    if (v > hi_v + 1e-12 || v < lo_v - 1e-12)
        throw std::domain_error("OdeSolution::inverse: value outside tabulated range");
    v = std::clamp(v, lo_v, hi_v);
    if (v >= hi_v) return grid_.front();
    if (v <= lo_v) return grid_.back();
    // values_ is strictly decreasing: locate bracketing interval
    auto it = std::lower_bound(values_.begin(), values_.end(), v, std::greater<double>());
    std::size_t k = static_cast<std::size_t>(it - values_.begin());
    if (k == 0) return grid_.front();
    double a = grid_[k - 1], b = grid_[std::min(k, grid_.size() - 1)];
    for (int iter = 0; iter < 80 && b - a > 1e-15; ++iter) {
        double m = 0.5 * (a + b);
        if (y_at(m) > v)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

double OdeSolution::integral_neg_inv_deriv(double a, double b) const {
    if (b < a) return -integral_neg_inv_deriv(b, a);
    a = std::clamp(a, grid_.front(), grid_.back());
    b = std::clamp(b, grid_.front(), grid_.back());
    auto cum_at = [this](double t) {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - grid_.begin());
        if (k == 0) return 0.0;
        if (k >= grid_.size()) return cum_neg_inv_deriv_.back();
        double t0 = grid_[k - 1];
        // partial interval via trapezoid on the (smooth, bounded) integrand
        double f0 = -1.0 / rhs(y_at(t0)), f1 = -1.0 / rhs(y_at(t));
        return cum_neg_inv_deriv_[k - 1] + 0.5 * (t - t0) * (f0 + f1);
    };
    return cum_at(b) - cum_at(a);
}

namespace hill_kertz {

namespace {

// ∫_0^1 dy / (y - y ln y + beta - 1) with the ln-kink at y = 0 handled by
// geometric panels toward the origin.
double theta_integral(double beta, bool use_gauss) {
    auto f = [beta](double y) {
        double denom = (y > 0.0 ? y - y * std::log(y) : 0.0) + beta - 1.0;
        return 1.0 / denom;
    };
    KahanSum total;
    double hi = 1.0;
    for (int k = 0; k < 48; ++k) {
        double lo = (k == 47) ? 0.0 : hi * 0.5;
        if (use_gauss)
            total.add(gauss_legendre(f, lo, hi, 20, 4));
        else
            total.add(adaptive_simpson(f, lo, hi, 1e-13, 1e-16).value);
        hi = lo;
    }
    return total.value();
}

}  // namespace

double integral_equation_residual(double theta) {
    return theta_integral(1.0 / theta, false) - 1.0;
}

double integral_equation_residual_gl(double theta) {
    return theta_integral(1.0 / theta, true) - 1.0;
}

double theta_star(double tol) {
    if (tol < 1e-12) tol = 1e-12;
    // integral is decreasing in beta; root is bracketed well inside (1, 4).
    // Gauss-Legendre panels drive the bisection (spectrally accurate on the
    // geometric layout); the Simpson route stays available as a cross-check.
    double beta = bisect([](double b) { return theta_integral(b, true) - 1.0; }, 1.0 + 1e-6, 4.0,
                         tol * 0.25);
    return 1.0 / beta;
}

OdeSolution solve_y(double theta, int grid_size) {
    if (!(theta > 0.5 && theta < 1.0)) throw std::invalid_argument("solve_y: theta outside (0.5,1)");
    if (grid_size < 16) grid_size = 16;
    double bm1 = 1.0 / theta - 1.0;
    const double t_end = 1.0 - 1e-9;
    std::vector<double> grid, values;
    grid.reserve(grid_size);
    values.reserve(grid_size);
    grid.push_back(0.0);
    values.push_back(1.0);
    bool hit_floor = false;
    double t_floor = t_end;
    double y = 1.0;
    for (int k = 1; k < grid_size && !hit_floor; ++k) {
        double s = std::sin(M_PI * k / (2.0 * (grid_size - 1)));
        double t_next = t_end * s * s;
        double t = grid.back();
        double h_total = t_next - t;
        const int substeps = 4;
        double h = h_total / substeps;
        for (int s_i = 0; s_i < substeps; ++s_i) {
            double k1 = ode_rhs(y, bm1);
            double k2 = ode_rhs(y + 0.5 * h * k1, bm1);
            double k3 = ode_rhs(y + 0.5 * h * k2, bm1);
            double k4 = ode_rhs(y + h * k3, bm1);
            double y_next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (y_next <= kYFloor) {
                // linear event location on this substep
                double frac = (y - kYFloor) / std::max(y - y_next, 1e-300);
                t_floor = t + s_i * h + frac * h;
                hit_floor = true;
                y = kYFloor;
                break;
            }
            y = y_next;
        }
        if (hit_floor) {
            grid.push_back(t_floor);
            values.push_back(kYFloor);
        } else {
            grid.push_back(t_next);
            values.push_back(y);
        }
    }
    return OdeSolution(theta, std::move(grid), std::move(values), hit_floor, t_floor);
}

double lambda_residual(double lambda_value, double p) {
    return -std::expm1(-lambda_value * p) - p * lambda_value * (-std::expm1(-lambda_value));
}

double lambda(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("lambda: p outside (0,1]");
    auto f = [p](double l) { return lambda_residual(l, p); };
    double hi = 2.0;
    while (f(hi) > 0.0 && hi < 1e9) hi *= 2.0;
    return bisect(f, 1e-12, hi, 1e-13);
}

}  // namespace hill_kertz

}  // namespace osud
