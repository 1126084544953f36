#include "rlab/kubo_mori.hpp"

#include <cmath>

#include "rlab/channels.hpp"
#include "rlab/errors.hpp"
#include "rlab/util.hpp"

namespace rlab {

namespace {

// Entrywise logarithmic-mean action in the eigenbasis of rho.
Eigen::MatrixXcd eigenbasis_scale(const DensityMatrix& rho, const Eigen::MatrixXcd& a,
                                  bool inverse) {
  require_hermitian(a, 1e-12, "omega argument");
  if (a.rows() != rho.dim()) throw DimensionError("omega: dimension mismatch");
  const Eigen::MatrixXcd& u = rho.eigenvectors();
  const Eigen::VectorXd& p = rho.eigenvalues();
  Eigen::MatrixXcd t = u.adjoint() * a * u;
  for (int i = 0; i < t.rows(); ++i) {
    for (int j = 0; j < t.cols(); ++j) {
      const double lm = log_mean(p(i), p(j));
      t(i, j) *= inverse ? 1.0 / lm : lm;
    }
  }
  Eigen::MatrixXcd out = u * t * u.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

Eigen::MatrixXcd omega_apply(const DensityMatrix& rho, const Eigen::MatrixXcd& a) {
  return eigenbasis_scale(rho, a, false);
}

Eigen::VectorXd omega_apply(const ClassicalState& rho, const Eigen::VectorXd& a) {
  if (a.size() != rho.size()) throw DimensionError("omega: size mismatch");
  return rho.probs().cwiseProduct(a);
}

Eigen::MatrixXcd omega_inverse(const DensityMatrix& rho, const Eigen::MatrixXcd& x) {
  return eigenbasis_scale(rho, x, true);
}

Eigen::VectorXd omega_inverse(const ClassicalState& rho, const Eigen::VectorXd& x) {
  if (x.size() != rho.size()) throw DimensionError("omega: size mismatch");
  return x.cwiseQuotient(rho.probs());
}

double inner_product(const DensityMatrix& rho, const Eigen::MatrixXcd& x,
                     const Eigen::MatrixXcd& y) {
  require_hermitian(x, 1e-12, "inner_product X");
  return (x * omega_inverse(rho, y)).trace().real();
}

double inner_product(const ClassicalState& rho, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) {
  if (x.size() != rho.size() || y.size() != rho.size()) {
    throw DimensionError("inner_product: size mismatch");
  }
  return (x.cwiseProduct(y).cwiseQuotient(rho.probs())).sum();
}

Eigen::MatrixXcd center_observable(const DensityMatrix& rho, const Eigen::MatrixXcd& a) {
  require_hermitian(a, 1e-12, "center_observable");
  const double mean = rho.expectation(a);
  return a - mean * Eigen::MatrixXcd::Identity(rho.dim(), rho.dim());
}

Eigen::VectorXd center_observable(const ClassicalState& rho, const Eigen::VectorXd& a) {
  return a.array() - rho.expectation(a);
}

double relevance(const DensityMatrix& rho, const KrausChannel& channel,
                 const Eigen::MatrixXcd& x) {
  require_hermitian(x, 1e-12, "relevance feature");
  const double denom = inner_product(rho, x, x);
  if (!(denom > 0.0)) throw DomainError("relevance: feature is zero");
  const DensityMatrix out = channel.apply(rho);
  const Eigen::MatrixXcd ex = channel.apply_matrix(x);
  return inner_product(out, ex, ex) / denom;
}

double relevance(const ClassicalState& rho, const StochasticChannel& channel,
                 const Eigen::VectorXd& x) {
  const double denom = inner_product(rho, x, x);
  if (!(denom > 0.0)) throw DomainError("relevance: feature is zero");
  const ClassicalState out = channel.apply(rho);
  const Eigen::VectorXd ex = channel.apply_vector(x);
  return inner_product(out, ex, ex) / denom;
}

}  // namespace rlab
