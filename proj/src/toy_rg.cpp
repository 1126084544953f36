#include "rlab/toy_rg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/util.hpp"

namespace rlab::toy {

double MomentVector::order(int k) const {
  for (size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] == k) return values(static_cast<int>(i));
  }
  throw ValidationError("MomentVector: order not present");
}

bool MomentVector::has(int k) const {
  return std::find(orders.begin(), orders.end(), k) != orders.end();
}

Eigen::VectorXd hermite_reference(int n, double tau, const Eigen::VectorXd& grid) {
  if (n < 0) throw ValidationError("hermite_reference: negative degree");
  Eigen::ArrayXd y = grid.array() / tau;
  Eigen::ArrayXd h_prev = Eigen::ArrayXd::Ones(grid.size());
  if (n == 0) return h_prev.matrix();
  Eigen::ArrayXd h_cur = y;
  double norm = 1.0;
  for (int k = 1; k < n; ++k) {
    Eigen::ArrayXd h_next = y * h_cur - static_cast<double>(k) * h_prev;
    h_prev.swap(h_cur);
    h_cur.swap(h_next);
  }
  for (int k = 2; k <= n; ++k) norm *= static_cast<double>(k);
  return (h_cur / std::sqrt(norm)).matrix();
}

double toy_exact_relevance(int n, double tau, double sigma) {
  if (!(tau > 0.0) || sigma < 0.0) throw DomainError("toy_exact_relevance: need tau > 0, sigma >= 0");
  const double r = tau * tau / (sigma * sigma + tau * tau);
  return std::pow(r, n);
}

namespace {

// Dimensionless even moments mu_k = <y^k> for y = x/tau, k <= kmax.
// Also used for the covariance-based Newton Jacobian, hence kmax + 6.
std::vector<double> reduced_moments(double lambda, double eps6, int kmax) {
  auto hval = [&](double y) {
    const double y2 = y * y;
    return 0.5 * y2 + lambda * y2 * y2 + eps6 * y2 * y2 * y2;
  };
  // A negative quartic with a weak sextic regulator digs outer wells whose
  // weight can overflow e^{-H}; all ratios are invariant under shifting H by
  // its minimum, so track it while scanning for the integration cutoff.
  double hmin = 0.0;
  double l = 4.0;
  for (double y = 0.0; y <= l; y += 0.0625) hmin = std::min(hmin, hval(y));
  auto envelope = [&](double y) {
    return (1.0 + std::pow(y, kmax)) * std::exp(-(hval(y) - hmin));
  };
  double peak = 0.0;
  for (double y = 0.0; y <= 4.0; y += 0.0625) peak = std::max(peak, envelope(y));
  while (envelope(l) > 1e-14 * peak) {
    const double l_next = 1.25 * l;
    for (double y = l; y <= l_next; y += 0.0625) {
      if (hval(y) < hmin) {
        hmin = hval(y);
        peak = 1.0;  // rescan against the lowered floor
        for (double yy = 0.0; yy <= l_next; yy += 0.0625) peak = std::max(peak, envelope(yy));
      }
    }
    l = l_next;
    if (l > 1e4) throw DivergenceError("moments: integrand does not decay");
  }
  std::vector<double> mu(kmax + 1, 0.0);
  double z = 0.0;
  for (int k = 0; k <= kmax; k += 2) {
    const double val = adaptive_simpson(
        [&](double y) { return std::pow(y, k) * std::exp(-(hval(y) - hmin)); }, 0.0, l, 1e-13);
    if (k == 0) {
      z = val;
    } else {
      mu[k] = val / z;
    }
  }
  mu[0] = 1.0;
  return mu;
}

}  // namespace

MomentVector moments(const ToyHamiltonian& h, int max_order) {
  if (!(h.tau > 0.0)) throw ValidationError("moments: tau must be positive");
  if (max_order < 2 || max_order % 2 != 0) {
    throw ValidationError("moments: max_order must be a positive even integer");
  }
  if (!h.normalizable()) {
    std::ostringstream os;
    os << "moments: e^{-H} is not normalizable (lambda = " << h.lambda << ", eps6 = " << h.eps6
       << ")";
    throw DivergenceError(os.str());
  }
  const auto mu = reduced_moments(h.lambda, h.eps6, max_order);
  MomentVector m;
  for (int k = 2; k <= max_order; k += 2) {
    m.orders.push_back(k);
  }
  m.values.resize(static_cast<int>(m.orders.size()));
  for (size_t i = 0; i < m.orders.size(); ++i) {
    m.values(static_cast<int>(i)) = std::pow(h.tau, m.orders[i]) * mu[m.orders[i]];
  }
  return m;
}

std::pair<double, double> match_couplings(double eps6_value, const MomentVector& target) {
  if (eps6_value < 0.0) throw DomainError("match_couplings: eps6 must be >= 0");
  if (!target.has(2) || !target.has(4)) {
    throw ValidationError("match_couplings: target must contain orders 2 and 4");
  }
  const double m2t = target.order(2);
  const double m4t = target.order(4);
  if (!(m2t > 0.0) || !(m4t >= m2t * m2t)) {
    throw ValidationError("match_couplings: target violates moment inequalities");
  }

  double tau = std::sqrt(m2t), lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    if (eps6_value == 0.0 && lambda < 0.0) lambda = 0.0;  // keep iterates normalizable
    const auto mu = reduced_moments(lambda, eps6_value, 10);
    const double t2 = tau * tau, t4 = t2 * t2;
    const double r2 = t2 * mu[2] - m2t;
    const double r4 = t4 * mu[4] - m4t;
    if (std::abs(r2 / m2t) < 1e-12 && std::abs(r4 / m4t) < 1e-12) {
      return {tau, lambda};
    }
    // d mu_k / d lambda = -(mu_{k+4} - mu_k mu_4)
    Eigen::Matrix2d jac;
    jac(0, 0) = 2.0 * tau * mu[2];
    jac(0, 1) = -t2 * (mu[6] - mu[2] * mu[4]);
    jac(1, 0) = 4.0 * tau * t2 * mu[4];
    jac(1, 1) = -t4 * (mu[8] - mu[4] * mu[4]);
    Eigen::Vector2d step = jac.partialPivLu().solve(Eigen::Vector2d(-r2, -r4));
    double damp = 1.0;
    if (std::abs(step(1)) > 0.2) damp = std::min(damp, 0.2 / std::abs(step(1)));
    if (std::abs(step(0)) > 0.2 * tau) damp = std::min(damp, 0.2 * tau / std::abs(step(0)));
    tau += damp * step(0);
    lambda += damp * step(1);
    if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(lambda)) {
      throw NoSolutionError("match_couplings: Newton iterate left the domain");
    }
  }
  throw NoSolutionError("match_couplings: Newton did not converge in 50 iterations");
}

namespace {

// tau at eps6 = 0 whose state has second moment tau_phys^2 at the given quartic
// coupling: m2 = tau^2 mu_2(lambda) so tau = tau_phys / sqrt(mu_2).
double solve_tau_bare(double lambda_phys, double tau_phys) {
  const auto mu = reduced_moments(lambda_phys, 0.0, 4);
  return tau_phys / std::sqrt(mu[2]);
}

}  // namespace

FlowRecord flow_trace(double lambda_phys, double tau_phys, const std::vector<double>& eps6_grid) {
  if (eps6_grid.empty()) throw ValidationError("flow_trace: empty grid");
  for (size_t i = 0; i < eps6_grid.size(); ++i) {
    if (eps6_grid[i] < 0.0) throw DomainError("flow_trace: eps6 must be >= 0");
    if (i > 0 && eps6_grid[i] <= eps6_grid[i - 1]) {
      throw ValidationError("flow_trace: eps6 grid must be increasing");
    }
  }
  if (!(tau_phys > 0.0)) throw ValidationError("flow_trace: tau_phys must be positive");
  ToyHamiltonian base;
  base.tau = solve_tau_bare(lambda_phys, tau_phys);
  base.lambda = lambda_phys;
  if (!base.normalizable()) {
    throw DivergenceError("flow_trace: (lambda_phys, eps6 = 0) state is not normalizable");
  }
  FlowRecord rec;
  rec.invariants = moments(base, 4);
  rec.tau_bare0 = base.tau;
  const int n = static_cast<int>(eps6_grid.size());
  rec.eps6.resize(n);
  rec.tau.resize(n);
  rec.lambda.resize(n);
  rec.m2.resize(n);
  rec.m4.resize(n);
  parallel_for(n, [&](int i) {
    const auto [t, l] = match_couplings(eps6_grid[i], rec.invariants);
    ToyHamiltonian h{t, l, eps6_grid[i]};
    const MomentVector m = moments(h, 4);
    rec.eps6(i) = eps6_grid[i];
    rec.tau(i) = t;
    rec.lambda(i) = l;
    rec.m2(i) = m.order(2);
    rec.m4(i) = m.order(4);
  });
  return rec;
}

RgCoefficients rg_coefficients(double h_eps, double h_lambda) {
  if (!(h_eps > 0.0) || !(h_lambda > 0.0)) throw DomainError("rg_coefficients: steps must be > 0");
  RgCoefficients out;

  // dlambda/deps and dtau/(tau deps) at the Gaussian point, against the
  // Gaussian target (tau_phys = 1)
  MomentVector gauss;
  gauss.orders = {2, 4};
  gauss.values.resize(2);
  gauss.values << 1.0, 3.0;
  Eigen::VectorXd eps(4), lam(4), tau(4);
  eps << 0.0, h_eps, 2.0 * h_eps, 3.0 * h_eps;
  lam(0) = 0.0;
  tau(0) = 1.0;
  for (int i = 1; i < 4; ++i) {
    const auto [t, l] = match_couplings(eps(i), gauss);
    tau(i) = t;
    lam(i) = l;
  }
  out.dlambda_deps = poly_fit_deriv_at_zero(eps, lam, 3);
  out.dtau_deps_rel = poly_fit_deriv_at_zero(eps, tau, 3);

  // dtau/(tau dlambda_phys) at eps = 0: ratio tau_bare/tau_phys as a function
  // of lambda_phys
  Eigen::VectorXd lp(4), ratio(4);
  lp << 0.0, h_lambda, 2.0 * h_lambda, 3.0 * h_lambda;
  ratio(0) = 1.0;
  for (int i = 1; i < 4; ++i) ratio(i) = solve_tau_bare(lp(i), 1.0);
  out.dtau_dlambda_rel = poly_fit_deriv_at_zero(lp, ratio, 3);

  // cross term: change of dtau/(tau deps) per unit lambda_phys
  const double lam_probe = 8.0 * h_lambda;
  const double tau0 = solve_tau_bare(lam_probe, 1.0);
  MomentVector target = moments(ToyHamiltonian{tau0, lam_probe, 0.0}, 4);
  Eigen::VectorXd tau_l(4);
  tau_l(0) = tau0;
  for (int i = 1; i < 4; ++i) tau_l(i) = match_couplings(eps(i), target).first;
  const double slope_at_lambda = poly_fit_deriv_at_zero(eps, tau_l, 3) / tau0;
  out.cross_term = (slope_at_lambda - out.dtau_deps_rel) / lam_probe;
  return out;
}

ClassicalState discretize(const ToyHamiltonian& h, const Eigen::VectorXd& grid) {
  Eigen::VectorXd w(grid.size());
  for (int i = 0; i < grid.size(); ++i) w(i) = std::exp(-h.energy(grid(i)));
  return ClassicalState::from_unnormalized(grid, w);
}

Eigen::VectorXd make_grid(double lo, double hi, int cells) {
  if (cells < 2 || !(hi > lo)) throw ConfigError("make_grid: bad grid request");
  Eigen::VectorXd g(cells);
  const double dx = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) g(i) = lo + (i + 0.5) * dx;
  return g;
}

void write_flow_csv(const FlowRecord& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_flow_csv: cannot open " + path);
  out << "eps6,tau,lambda,m2,m4\n";
  for (int i = 0; i < r.eps6.size(); ++i) {
    out << format_full(r.eps6(i)) << "," << format_full(r.tau(i)) << ","
        << format_full(r.lambda(i)) << "," << format_full(r.m2(i)) << ","
        << format_full(r.m4(i)) << "\n";
  }
}

}  // namespace rlab::toy
