#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlab/channels.hpp"
#include "rlab/state.hpp"

namespace rlab::props {

using Rng = std::mt19937_64;

/// Full-rank random density matrix (Wishart with a small ridge).
DensityMatrix random_density(int dim, Rng& rng);

/// Traceless Hermitian feature, normalized to unit HS norm.
Eigen::MatrixXcd random_traceless_hermitian(int dim, Rng& rng);

/// Haar-style random channel from a random isometry split into Kraus blocks.
KrausChannel random_kraus_channel(int dim_in, int dim_out, int kraus_count, Rng& rng);

/// 64-point Gauss-Legendre quadrature of the integral representation of
/// Omega_rho(A); deliberately independent of the logarithmic-mean code path.
Eigen::MatrixXcd omega_integral_quadrature(const DensityMatrix& rho, const Eigen::MatrixXcd& a,
                                           int points = 64);

/// Umegaki relative entropy Tr(rho (log rho - log sigma)) via eigensolves.
double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

struct CheckStat {
  std::string name;
  int trials = 0;
  int violations = 0;
  double worst = 0.0;  // largest deviation (or smallest margin) observed
};

struct PropertyConfig {
  std::vector<int> dims{2, 3, 4, 6};
  int trials_per_dim = 100;
  std::uint64_t seed = 1;
  double eta_slack = 1e-9;
  double adjoint_tol = 1e-9;
  double omega_oracle_tol = 1e-10;
  double min_entropy_slope = 2.9;
};

struct PropertyReport {
  std::vector<CheckStat> checks;
  int total_violations = 0;
  std::vector<std::string> failures;  // one line per violation, capped
};

/// Randomized invariants of the metric/channel machinery: relevance bounds,
/// metric positivity, recovery adjoint identity, the integral-representation
/// oracle, Heisenberg duality/unitality, and the quadratic expansion of the
/// relative entropy.
PropertyReport run_quantum_property_suite(const PropertyConfig& cfg);

void write_report_csv(const PropertyReport& report, const std::string& path);

}  // namespace rlab::props
