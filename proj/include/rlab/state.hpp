#pragma once

#include <Eigen/Dense>

namespace rlab {

/// Probability vector on a uniform grid. `probs` are cell masses (the grid
/// spacing is folded in), strictly positive and summing to one.
class ClassicalState {
 public:
  ClassicalState(Eigen::VectorXd grid, Eigen::VectorXd probs);

  /// Normalizes exp(-energy) cell weights into a state on `grid`.
  static ClassicalState from_unnormalized(Eigen::VectorXd grid, const Eigen::VectorXd& weights);

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  double dx() const { return dx_; }
  int size() const { return static_cast<int>(probs_.size()); }

  /// Expectation of a function given by its grid values.
  double expectation(const Eigen::VectorXd& observable) const;

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd probs_;
  double dx_ = 0.0;
};

/// Full-rank density matrix. The eigendecomposition is computed once at
/// construction and shared by all metric operations.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd m, double rank_floor = 1e-12);

  static DensityMatrix maximally_mixed(int dim);

  const Eigen::MatrixXcd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  /// Eigenvalues ascending, all > rank floor.
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }
  double rank_floor() const { return floor_; }

  double expectation(const Eigen::MatrixXcd& observable) const;

 private:
  Eigen::MatrixXcd m_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
  double floor_;
};

/// Throws ValidationError unless H is Hermitian within tol (absolute, on the
/// largest entry).
void require_hermitian(const Eigen::MatrixXcd& h, double tol = 1e-12, const char* what = "matrix");

}  // namespace rlab
