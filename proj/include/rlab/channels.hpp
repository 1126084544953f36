#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rlab/state.hpp"

namespace rlab {

/// Column-stochastic map between (possibly different) uniform grids.
class StochasticChannel {
 public:
  StochasticChannel(Eigen::MatrixXd matrix, Eigen::VectorXd grid_in, Eigen::VectorXd grid_out);

  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::VectorXd& grid_in() const { return grid_in_; }
  const Eigen::VectorXd& grid_out() const { return grid_out_; }
  int dim_in() const { return static_cast<int>(m_.cols()); }
  int dim_out() const { return static_cast<int>(m_.rows()); }

  ClassicalState apply(const ClassicalState& rho) const;
  /// Linear action on an arbitrary vector (features, unnormalized weights).
  Eigen::VectorXd apply_vector(const Eigen::VectorXd& v) const;
  /// Adjoint action on observables: matrix^T * b. Unital for stochastic maps.
  Eigen::VectorXd adjoint_apply(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd m_;
  Eigen::VectorXd grid_in_, grid_out_;
};

enum class CoarseGridPolicy { reject, allow };

/// Discretized Gaussian convolution kernel on `grid`; every column is
/// renormalized to sum exactly to one, compensating truncation at the edges.
/// Grids coarser than sigma/3 are rejected unless the policy allows them.
StochasticChannel build_gaussian_convolution(const Eigen::VectorXd& grid, double sigma,
                                             CoarseGridPolicy policy = CoarseGridPolicy::reject);

/// Kernel of the linear-Gaussian map y = scale * x + noise, noise ~ N(0, sigma^2).
StochasticChannel build_gaussian_map(const Eigen::VectorXd& grid_in,
                                     const Eigen::VectorXd& grid_out, double scale, double sigma,
                                     CoarseGridPolicy policy = CoarseGridPolicy::reject);

/// Trace-preserving quantum channel given by Kraus operators dim_in -> dim_out.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Eigen::MatrixXcd> kraus_ops);

  static KrausChannel identity(int dim);

  const std::vector<Eigen::MatrixXcd>& kraus_ops() const { return ks_; }
  int dim_in() const { return static_cast<int>(ks_.front().cols()); }
  int dim_out() const { return static_cast<int>(ks_.front().rows()); }

  /// sum_i K_i rho K_i^+, revalidated as a state (rank floor applies).
  DensityMatrix apply(const DensityMatrix& rho, double rank_floor = 1e-12) const;
  /// Linear action on an arbitrary matrix (features, non-full-rank states).
  Eigen::MatrixXcd apply_matrix(const Eigen::MatrixXcd& x) const;
  /// Heisenberg picture: sum_i K_i^+ B K_i.
  Eigen::MatrixXcd adjoint_apply(const Eigen::MatrixXcd& b) const;

 private:
  std::vector<Eigen::MatrixXcd> ks_;
};

/// Kraus set {1_keep tensor <i|_discard} tracing out every subsystem not in
/// `keep` (0-based indices into `dims`).
KrausChannel partial_trace_channel(const std::vector<int>& dims, const std::vector<int>& keep);

/// Gaussian channel acting on covariance data as gamma -> X^T gamma X + Y,
/// with the symplectic form in (all positions, then all momenta) ordering.
struct GaussianChannelSpec {
  Eigen::MatrixXd x_matrix;
  Eigen::MatrixXd y_matrix;
  bool quantum = true;

  std::optional<double> sigma;    // spatial precision length
  std::optional<double> h;        // classical field-value uncertainty
  std::optional<double> h_phi, h_pi;
  std::optional<double> sigma_x, sigma_p;

  /// Symplectic kernel S for n modes in (positions, momenta) ordering.
  static Eigen::MatrixXd symplectic_form(int n_modes);

  /// Quantum: Y + iS - X^T (iS) X >= 0. Classical: Y >= 0.
  void validate(double tol = 1e-10) const;
};

GaussianChannelSpec particle_noise_spec(double sigma_x, double sigma_p);

/// Metric adjoint of the channel at rho: R = Omega_rho E^+ Omega^{-1}_{E(rho)},
/// realized lazily as the composition (the channel output state is cached).
class RecoveryMap {
 public:
  RecoveryMap(DensityMatrix rho, KrausChannel channel, double rank_floor = 1e-12);

  const DensityMatrix& rho() const { return rho_; }
  const DensityMatrix& output_state() const { return out_; }
  const KrausChannel& channel() const { return channel_; }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& y) const;

 private:
  DensityMatrix rho_;
  KrausChannel channel_;
  DensityMatrix out_;
};

/// One-shot recovery application (quantum and classical).
Eigen::MatrixXcd recovery_apply(const DensityMatrix& rho, const KrausChannel& channel,
                                const Eigen::MatrixXcd& y);
Eigen::VectorXd recovery_apply(const ClassicalState& rho, const StochasticChannel& channel,
                               const Eigen::VectorXd& y);

}  // namespace rlab
