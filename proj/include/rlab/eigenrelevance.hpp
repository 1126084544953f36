#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlab/channels.hpp"
#include "rlab/state.hpp"

namespace rlab {

/// HS-orthonormal Hermitian basis of dim x dim operators: diagonal units
/// E_ii, then (E_ij + E_ji)/sqrt(2), then i(E_ij - E_ji)/sqrt(2) for i < j.
std::vector<Eigen::MatrixXcd> hermitian_basis(int dim);

/// Real coordinates of a Hermitian matrix in hermitian_basis(dim) order.
Eigen::VectorXd to_basis_coords(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd from_basis_coords(const Eigen::VectorXd& coords, int dim);

enum class OperatorSpaceKind { classical, quantum };

/// Generalized symmetric pencil of the relevance problem: F represents
/// X -> E^+ Omega^{-1}_{E(rho)} E(X) and K represents Omega_rho^{-1}, both in
/// a real orthonormal operator basis, so that x^T F x / x^T K x is the
/// relevance of the feature with coordinates x.
struct RelevancePencil {
  Eigen::MatrixXd f;
  Eigen::MatrixXd k;
  OperatorSpaceKind kind = OperatorSpaceKind::quantum;
  int op_dim = 0;     // operator-space dimension
  int state_dim = 0;  // matrix dimension (quantum) or grid cells (classical)
  double asymmetry_f = 0.0;  // max |F - F^T| seen before symmetrization
  double asymmetry_k = 0.0;
};

RelevancePencil relevance_operator(const DensityMatrix& rho, const KrausChannel& channel,
                                   int dense_cap = 4096);
RelevancePencil relevance_operator(const ClassicalState& rho, const StochasticChannel& channel,
                                   int dense_cap = 4096);

struct RelevanceSpectrum {
  Eigen::VectorXd etas;       // descending, clamped to [0, 1]
  Eigen::MatrixXd features;   // column n: coordinates of X_n, K-orthonormal
  Eigen::MatrixXd observables;  // column n: coordinates of A_n = K * X_n
  std::vector<int> degenerate_block;  // block id per index; gaps < 1e-9 share a block
  OperatorSpaceKind kind = OperatorSpaceKind::quantum;
  int state_dim = 0;
  int threshold = 0;          // last retained index (0-based); retained = {0..threshold}
  double clamp_excess = 0.0;  // worst out-of-[0,1] amount seen before clamping
  double jitter_used = 0.0;   // Cholesky diagonal jitter, 0 when none was needed

  /// Center the retained observables so Tr(rho A_n) = 0 (quantum overload uses
  /// basis coordinates of rho; classical uses the probability vector).
  void center_observables(const Eigen::VectorXd& state_coords);
};

/// Solves F x = eta K x via Cholesky K = L L^T and a symmetric eigensolve of
/// L^{-1} F L^{-T}. Returns the `count` most relevant pairs; eigenvectors are
/// rho-orthonormal and sign-fixed (largest-magnitude coefficient positive).
RelevanceSpectrum solve_spectrum(const RelevancePencil& pencil, int count);

/// Threshold selection: retain the top (n+1) directions (indices 0..n), or all
/// directions with eta >= eta_min.
void set_threshold_by_index(RelevanceSpectrum& s, int n);
void set_threshold_by_min_relevance(RelevanceSpectrum& s, double eta_min);

/// alpha_j = <X_j, Y>_rho for every retained j; `y_coords` are the feature
/// coordinates of Y in the pencil's operator basis.
Eigen::VectorXd project_relevant(const RelevanceSpectrum& s, const Eigen::VectorXd& y_coords);

struct EquivalenceWitness {
  bool equivalent = false;
  int worst_index = -1;
  double worst_value = 0.0;
};

/// First-order equivalence: |Tr((rho1 - rho2) A_i)| <= tol for all retained i.
/// States are passed as coordinate vectors in the pencil's operator basis
/// (classical: the probability vectors themselves).
EquivalenceWitness equivalent_first_order(const RelevanceSpectrum& s,
                                          const Eigen::VectorXd& rho1_coords,
                                          const Eigen::VectorXd& rho2_coords, double tol);

/// CSV export: header then rows (index, eta, feature coefficients...).
void export_spectrum_csv(const RelevanceSpectrum& s, const std::string& path);

}  // namespace rlab
