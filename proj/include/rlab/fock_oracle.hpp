#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rlab::gauss {

/// Independent check of the quantum-particle relevance formulas: the
/// generalized relevance pencil assembled in a truncated Fock basis, with the
/// isotropic displacement-noise channel (u = v, sigma_x = sigma_p) realized
/// exactly through its amplifier-compose-loss Fock representation. The pencil
/// block-diagonalizes over the ladder offset j - k of matrix units, so spectra
/// are reported per offset.
struct FockOracleParams {
  int cutoff = 40;        // operator space: matrices on span{|0..cutoff-1>}
  int max_offset = 2;     // offsets 0..max_offset are solved
  double tail_factor = 34.0;  // ambient Fock size ~ tail_factor * noise + 8 * cutoff
};

struct FockOracleResult {
  std::vector<Eigen::VectorXd> etas_by_offset;  // descending per offset
  int cutoff = 0;
  int ambient = 0;
  double noise_w = 0.0;  // sigma^2 / 2
  double nbar = 0.0;     // (uv - 1) / 2

  /// Top eigenvalue of the odd sector (offset 1): the position/momentum line.
  double eta_linear() const { return etas_by_offset.at(1)(0); }
  /// Second eigenvalue of offset 0 (below the exact eta = 1 unit direction).
  double eta_quadratic_thermal() const { return etas_by_offset.at(0)(1); }
  /// Top eigenvalue of offset 2: the squeezing direction.
  double eta_quadratic_squeeze() const { return etas_by_offset.at(2)(0); }
};

/// uv > 1; sigma is the common quadrature noise. Throws DomainError otherwise.
FockOracleResult fock_gaussian_pencil(double uv, double sigma, const FockOracleParams& params);

/// Closed-form eigenvalues of the two quadratic directions at the isotropic
/// point, used as the reference the oracle is compared against.
double exact_quadratic_thermal_eta(double uv, double sigma);
double exact_quadratic_squeeze_eta(double uv, double sigma);

/// Fock band representation of the additive-noise channel: coefficients of
/// E(|k+d><k|) on |n+d><n|, exact via amplifier-after-loss composition.
/// Exposed for direct unit testing against a quadrature-built channel.
Eigen::VectorXd noise_channel_band(int j, int k, double w, int ambient);

}  // namespace rlab::gauss
