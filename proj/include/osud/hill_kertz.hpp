#pragma once

#include <vector>

#include "osud/numerics.hpp"

namespace osud {

/// Tabulated solution of y'(t) = y(ln y - 1) - (1/theta - 1), y(0) = 1,
/// on a cosine-spaced grid dense near t = 1. The derivative is exact
/// (evaluated from the right-hand side), interpolation is monotone Hermite.
class OdeSolution {
  public:
    OdeSolution(double theta, std::vector<double> grid, std::vector<double> values,
                bool hit_floor, double t_floor);

    double theta() const { return theta_; }
    double t_end() const { return grid_.back(); }
    double y_at(double t) const;
    double deriv_at(double t) const { return rhs(y_at(t)); }
    /// Closed-form ODE right-hand side: y' = -(y - y ln y + 1/theta - 1).
    double rhs(double y) const;
    /// t such that y(t) = v; v must lie within the tabulated range.
    double inverse(double v) const;
    /// ∫_a^b (-1/y'(s)) ds over the tabulated solution.
    double integral_neg_inv_deriv(double a, double b) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    /// Shooting diagnostics: whether y reached the 1e-10 floor, and where.
    bool hit_floor() const { return hit_floor_; }
    double t_floor() const { return t_floor_; }

  private:
    double theta_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> cum_neg_inv_deriv_;  // ∫_0^{t_k} -1/y'
    bool hit_floor_;
    double t_floor_;
};

namespace hill_kertz {

/// The constant theta* = 1/beta* with ∫_0^1 (y - y ln y + beta - 1)^{-1} dy = 1,
/// solved by bisection over beta.
double theta_star(double tol = 1e-10);

/// Residual ∫_0^1 (y - y ln y + 1/theta - 1)^{-1} dy - 1 for a given theta.
double integral_equation_residual(double theta);

/// Same residual computed with composite Gauss-Legendre panels instead of
/// adaptive Simpson; used to cross-check the quadrature route.
double integral_equation_residual_gl(double theta);

/// Integrates the ODE from y(0) = 1; at theta = theta* the solution decays
/// to 0 as t -> 1. Off theta* the shooting diagnostics record the failure.
OdeSolution solve_y(double theta, int grid_size = 16384);

/// Unique positive root of (1 - e^{-lambda p}) = p lambda (1 - e^{-lambda}).
double lambda(double p);

double lambda_residual(double lambda_value, double p);

}  // namespace hill_kertz

}  // namespace osud
