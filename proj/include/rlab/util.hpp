#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rlab {

/// Logarithmic mean L(a,b) = (a-b)/(log a - log b), L(a,a) = a.
/// Uses a series around a = b to avoid cancellation; requires a, b > 0.
inline double log_mean(double a, double b) {
  const double r = a / b - 1.0;
  if (std::abs(r) < 1e-8) {
    // L = b (1 + r/2 - r^2/12 + ...)
    return b * (1.0 + 0.5 * r - r * r / 12.0);
  }
  return (a - b) / (std::log(a) - std::log(b));
}

/// Format with 17 significant digits, locale-independent.
std::string format_full(double x);

/// Ordinary least squares y = slope*x + intercept; also the largest |residual|.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};
LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Degree-`deg` polynomial least squares fit; returns the derivative at x = 0.
double poly_fit_deriv_at_zero(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int deg);

/// Nodes and weights of n-point Gauss-Legendre quadrature on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive Simpson quadrature of f on [a, b] to relative tolerance rel_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-13, int max_depth = 60);

/// Runs fn(i) for i in [0, n). Thread count is capped by the
/// RELEVANCE_LAB_THREADS environment variable (default: hardware concurrency).
void parallel_for(int n, const std::function<void(int)>& fn);

int max_threads();

/// Kronecker product of complex matrices.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace rlab
