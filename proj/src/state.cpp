#include "rlab/state.hpp"

#include <cmath>
#include <sstream>

#include "rlab/errors.hpp"

namespace rlab {

ClassicalState::ClassicalState(Eigen::VectorXd grid, Eigen::VectorXd probs)
    : grid_(std::move(grid)), probs_(std::move(probs)) {
  if (grid_.size() != probs_.size() || grid_.size() < 2) {
    throw DimensionError("ClassicalState: grid and probs must have equal size >= 2");
  }
  dx_ = grid_(1) - grid_(0);
  if (dx_ <= 0.0) throw ValidationError("ClassicalState: grid must be strictly increasing");
  for (int i = 1; i < grid_.size(); ++i) {
    const double step = grid_(i) - grid_(i - 1);
    if (std::abs(step - dx_) > 1e-12 * std::abs(dx_) + 1e-15) {
      throw ValidationError("ClassicalState: grid spacing is not uniform");
    }
  }
  for (int i = 0; i < probs_.size(); ++i) {
    if (!(probs_(i) > 0.0)) {
      std::ostringstream os;
      os << "ClassicalState: prob[" << i << "] = " << probs_(i) << " is not strictly positive";
      throw RankError(os.str());
    }
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-12) {
    throw ValidationError("ClassicalState: probs must sum to 1 within 1e-12");
  }
}

ClassicalState ClassicalState::from_unnormalized(Eigen::VectorXd grid,
                                                 const Eigen::VectorXd& weights) {
  const double z = weights.sum();
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw ValidationError("ClassicalState: weights do not normalize");
  }
  Eigen::VectorXd p = weights / z;
  p /= p.sum();  // second pass tightens round-off on the unit-sum invariant
  return ClassicalState(std::move(grid), std::move(p));
}

double ClassicalState::expectation(const Eigen::VectorXd& observable) const {
  if (observable.size() != probs_.size()) {
    throw DimensionError("expectation: observable size mismatch");
  }
  return probs_.dot(observable);
}

void require_hermitian(const Eigen::MatrixXcd& h, double tol, const char* what) {
  if (h.rows() != h.cols()) throw DimensionError(std::string(what) + ": not square");
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    std::ostringstream os;
    os << what << ": not Hermitian, deviation " << dev << " exceeds " << tol;
    throw ValidationError(os.str());
  }
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m, double rank_floor)
    : m_(std::move(m)), floor_(rank_floor) {
  require_hermitian(m_, 1e-12, "DensityMatrix");
  const double tr_dev = std::abs(m_.trace() - std::complex<double>(1.0, 0.0));
  if (tr_dev > 1e-12) {
    std::ostringstream os;
    os << "DensityMatrix: trace deviates from 1 by " << tr_dev;
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m_ + m_.adjoint()));
  if (es.info() != Eigen::Success) throw NumericError("DensityMatrix: eigensolver failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  if (evals_(0) <= floor_) {
    std::ostringstream os;
    os << "DensityMatrix: minimum eigenvalue " << evals_(0) << " at or below rank floor "
       << floor_;
    throw RankError(os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::expectation(const Eigen::MatrixXcd& observable) const {
  if (observable.rows() != dim() || observable.cols() != dim()) {
    throw DimensionError("expectation: observable dimension mismatch");
  }
  return (m_ * observable).trace().real();
}

}  // namespace rlab
