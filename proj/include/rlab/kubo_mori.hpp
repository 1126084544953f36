#pragma once

#include <Eigen/Dense>

#include "rlab/state.hpp"

namespace rlab {

class KrausChannel;
class StochasticChannel;

// Kubo-Mori (Bogoliubov) metric machinery. Features X are tangent directions
// of state space (traceless Hermitian matrices / zero-sum vectors); observables
// A are their duals under Omega^{-1}. Both are passed as plain Eigen payloads;
// the contracts below state what each operation assumes.

/// Omega_rho(A): in the eigenbasis of rho, entry (i,j) of A is multiplied by
/// the logarithmic mean of (p_i, p_j). Classical overload: elementwise p * A.
Eigen::MatrixXcd omega_apply(const DensityMatrix& rho, const Eigen::MatrixXcd& a);
Eigen::VectorXd omega_apply(const ClassicalState& rho, const Eigen::VectorXd& a);

/// Omega_rho^{-1}(X): entrywise division by the logarithmic mean (resp. p).
Eigen::MatrixXcd omega_inverse(const DensityMatrix& rho, const Eigen::MatrixXcd& x);
Eigen::VectorXd omega_inverse(const ClassicalState& rho, const Eigen::VectorXd& x);

/// <X, Y>_rho = Tr(X Omega_rho^{-1}(Y)). Classical: sum_i X_i Y_i / p_i.
double inner_product(const DensityMatrix& rho, const Eigen::MatrixXcd& x,
                     const Eigen::MatrixXcd& y);
double inner_product(const ClassicalState& rho, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y);

/// A - Tr(rho A) * identity. Centering is always explicit, never automatic.
Eigen::MatrixXcd center_observable(const DensityMatrix& rho, const Eigen::MatrixXcd& a);
Eigen::VectorXd center_observable(const ClassicalState& rho, const Eigen::VectorXd& a);

/// Relevance ratio <E(X),E(X)>_{E(rho)} / <X,X>_rho, in [0, 1].
double relevance(const DensityMatrix& rho, const KrausChannel& channel,
                 const Eigen::MatrixXcd& x);
double relevance(const ClassicalState& rho, const StochasticChannel& channel,
                 const Eigen::VectorXd& x);

}  // namespace rlab
