#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rlab/state.hpp"

namespace rlab::toy {

/// H(x) = x^2/(2 tau^2) + lambda (x/tau)^4 + eps6 (x/tau)^6.
struct ToyHamiltonian {
  double tau = 1.0;
  double lambda = 0.0;
  double eps6 = 0.0;

  double energy(double x) const {
    const double y = x / tau;
    const double y2 = y * y;
    return 0.5 * y2 + lambda * y2 * y2 + eps6 * y2 * y2 * y2;
  }
  /// e^{-H} integrable: eps6 > 0, or eps6 = 0 with lambda > 0, or both zero.
  bool normalizable() const {
    if (eps6 > 0.0) return true;
    if (eps6 == 0.0) return lambda >= 0.0;
    return false;
  }
};

struct MomentVector {
  std::vector<int> orders;      // even orders ascending
  Eigen::VectorXd values;       // central moments <x^k>

  double order(int k) const;    // throws if k absent
  bool has(int k) const;
};

/// Probabilists' Hermite observable He_n(x/tau)/sqrt(n!) on the grid.
Eigen::VectorXd hermite_reference(int n, double tau, const Eigen::VectorXd& grid);

/// Closed-form relevance of the degree-n Hermite direction:
/// (tau^2/(sigma^2+tau^2))^n.
double toy_exact_relevance(int n, double tau, double sigma);

/// Even moments <x^k> for k <= max_order under e^{-H}/Z, by adaptive Simpson
/// on [-L, L] with L chosen so the integrand tail is < 1e-14 of its peak.
MomentVector moments(const ToyHamiltonian& h, int max_order);

/// Newton solve for (tau, lambda) matching target orders {2, 4} at the given
/// sextic coupling. Throws NoSolutionError after 50 iterations.
std::pair<double, double> match_couplings(double eps6_value, const MomentVector& target);

/// Running-coupling trajectory over a grid of sextic regulator values, all
/// rows sharing the first four moments of the (tau_phys, lambda_phys) state.
struct FlowRecord {
  Eigen::VectorXd eps6, tau, lambda, m2, m4;
  MomentVector invariants;  // the shared target moments
  double tau_bare0 = 0.0;   // tau at eps6 = 0
};

FlowRecord flow_trace(double lambda_phys, double tau_phys, const std::vector<double>& eps6_grid);

/// First-order response of the bare couplings around the Gaussian point,
/// extracted by one-sided cubic fits through {0, h, 2h, 3h}. `cross_term` is
/// the lambda_phys-dependence of dtau/(tau deps), reported because the
/// first-order coefficients alone do not pin it.
struct RgCoefficients {
  double dlambda_deps = 0.0;      // expected -15
  double dtau_dlambda_rel = 0.0;  // d(tau/tau_phys)/dlambda_phys, expected +6
  double dtau_deps_rel = 0.0;     // d(tau/tau_phys)/deps, expected -45
  double cross_term = 0.0;        // d^2(tau/tau_phys)/(dlambda_phys deps)
};

RgCoefficients rg_coefficients(double h_eps = 1.25e-4, double h_lambda = 1.25e-3);

/// Cell-mass discretization of e^{-H} on the grid.
ClassicalState discretize(const ToyHamiltonian& h, const Eigen::VectorXd& grid);

Eigen::VectorXd make_grid(double lo, double hi, int cells);

/// CSV with mandatory header eps6,tau,lambda,m2,m4.
void write_flow_csv(const FlowRecord& r, const std::string& path);

}  // namespace rlab::toy
