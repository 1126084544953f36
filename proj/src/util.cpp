#include "rlab/util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rlab/errors.hpp"

namespace rlab {

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("fit_line: need at least two points of equal length");
  }
  const double n = static_cast<double>(x.size());
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (sxx <= 0.0) throw ValidationError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
  f.intercept = my - f.slope * mx;
  (void)n;
  f.max_abs_residual = (y.array() - (f.slope * x.array() + f.intercept)).abs().maxCoeff();
  return f;
}

double poly_fit_deriv_at_zero(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int deg) {
  if (x.size() != y.size() || x.size() < deg + 1) {
    throw ValidationError("poly_fit_deriv_at_zero: not enough points for degree");
  }
  Eigen::MatrixXd V(x.size(), deg + 1);
  for (int i = 0; i < x.size(); ++i) {
    double t = 1.0;
    for (int j = 0; j <= deg; ++j) {
      V(i, j) = t;
      t *= x(i);
    }
  }
  Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  return c(1);
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton on Legendre polynomials over [-1, 1], then map to [0, 1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Seed the absolute tolerance from a uniform magnitude scan; the three-point
  // estimate alone can miss an interior peak entirely and starve the
  // tolerance, forcing runaway subdivision.
  double peak = std::max({std::abs(fa), std::abs(fm), std::abs(fb)});
  for (int i = 1; i < 64; i += 2) {
    peak = std::max(peak, std::abs(f(a + (b - a) * i / 64.0)));
  }
  const double scale = std::max({std::abs(whole), peak * (b - a), 1e-300});
  // depth is capped with forced acceptance: leaves are then ~(b-a)/2^24 wide
  // and their Simpson error is far below any tolerance used here
  max_depth = std::min(max_depth, 24);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("RELEVANCE_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(max_threads(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace rlab
