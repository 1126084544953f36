#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rlab/errors.hpp"

namespace rlab::gauss {

/// Finite cubic lattice in d dimensions: `extent` sites per dimension with
/// spacing `spacing` (the UV cutoff is pi/spacing). Modes are the discrete
/// Fourier wavevectors.
struct FieldLattice {
  int d = 1;
  double spacing = 1.0;
  int extent = 2;

  FieldLattice(int d_, double spacing_, int extent_);

  long mode_count() const;
  /// |k|^2 for every lattice mode (row-major over dimensions).
  Eigen::VectorXd mode_k2() const;
};

/// Thermal Gaussian scalar field: covariance eigenvalue a_k = beta (k^2 + m^2).
struct ClassicalFieldTheory {
  double beta = 1.0;
  double m = 1.0;

  double a(double k2) const { return beta * (k2 + m * m); }
};

/// Smearing channel data: spatial kernel X_k = n_sigma * exp(-k^2 sigma^2 / 2)
/// and field-value uncertainty h. The kernel normalization defaults to 1; the
/// region-averaging convention (2 pi sigma^2)^{-d/2} shifts h and is exposed
/// as a flag.
struct SmearingParams {
  double sigma = 1.0;
  double h = 1.0;
  double n_sigma = 1.0;
  bool averaging_normalization = false;

  double kernel(double k2, int d) const {
    double n = n_sigma;
    if (averaging_normalization) n *= std::pow(2.0 * M_PI * sigma * sigma, -0.5 * d);
    return n * std::exp(-0.5 * k2 * sigma * sigma);
  }
};

/// Relevance of a product of Hermite directions over distinct modes:
/// prod_i (1 + a_{k_i} h^2 e^{k_i^2 sigma^2})^{-n_i}. Modes are given as
/// wavevectors; repeated modes are rejected.
double classical_mode_relevance(const std::vector<Eigen::VectorXd>& modes,
                                const std::vector<int>& degrees, const ClassicalFieldTheory& th,
                                const SmearingParams& sm);

/// Relevance of the mean-subtracted observable int phi^2:
/// sum_k a_k^{-2} eta1_{k,2} / sum_k a_k^{-2}.
double phi_squared_relevance(const FieldLattice& lat, const ClassicalFieldTheory& th,
                             const SmearingParams& sm);

/// Relevance of the mean-subtracted observable int phi (d.d) phi, whose mode
/// components carry an extra k^2.
double phi_laplacian_relevance(const FieldLattice& lat, const ClassicalFieldTheory& th,
                               const SmearingParams& sm);

enum class FieldObservable { phi2, phi_laplacian_phi };

struct ScalingFit {
  double slope = 0.0;
  double max_residual = 0.0;  // worst log-space deviation from the fit line
  Eigen::VectorXd abscissae;  // the swept parameter values
  Eigen::VectorXd etas;
};

/// Least-squares slope of log eta against log sigma over `sigmas`. Throws
/// WindowError when the log-log residual exceeds `nonlinearity_tol`
/// (the window is then outside the asymptotic regime).
ScalingFit scaling_exponent(FieldObservable obs, const FieldLattice& lat,
                            const ClassicalFieldTheory& th, double h,
                            const std::vector<double>& sigmas, double nonlinearity_tol = 0.05);

/// Analogous fit of log eta against log h at fixed sigma.
ScalingFit scaling_exponent_in_h(FieldObservable obs, const FieldLattice& lat,
                                 const ClassicalFieldTheory& th, double sigma,
                                 const std::vector<double>& hs, double nonlinearity_tol = 0.05);

/// Gaussian state of one quantum particle with characteristic-function widths
/// u (momentum) and v (position), uv >= 1.
struct QuantumGaussianState {
  double u = 1.0;
  double v = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;

  double s() const;            // arccoth(uv), defined for uv > 1
  double alpha_const() const;  // log sqrt(u^2 v^2 - 1)
};

/// Linear combination c_x2 x^2 + c_p2 p^2 + c_id 1.
struct QuadraticObservable {
  double c_x2 = 0.0;
  double c_p2 = 0.0;
  double c_id = 0.0;
};

struct ParticleRelevance {
  double eta_x = 0.0;        // asymptotic v/(s u) sigma_x^{-2}
  double eta_p = 0.0;        // asymptotic u/(s v) sigma_p^{-2}
  double eta_x_exact = 0.0;  // closed-form linear-sector value
  double eta_p_exact = 0.0;
  QuadraticObservable quad_x;  // x^2 - (s/2)(u/v) 1, eta u^4 sigma_p^{-4}
  QuadraticObservable quad_p;  // p^2 - (s/2)(v/u) 1, eta v^4 sigma_x^{-4}
  double quad_eta_x = 0.0;
  double quad_eta_p = 0.0;
};

/// Gaussian displacement noise mapping u^2 -> u^2 + sigma_p^2 and
/// v^2 -> v^2 + sigma_x^2. Throws DomainError on the uv <= 1 boundary.
ParticleRelevance quantum_particle_relevance(const QuantumGaussianState& st, double sigma_x,
                                             double sigma_p);

/// Thermal scalar quantum field: dispersion omega_k = sqrt(k^2 + m^2).
struct QFieldState {
  double beta = 1.0;
  double m = 1.0;

  double omega(double k) const { return std::sqrt(k * k + m * m); }
};

/// Mode smearing for the quantum field. The Pi denominator reuses h_phi as
/// printed in the closed forms; set pi_uses_h_pi to substitute h_pi instead.
struct QFieldSmearing {
  double sigma = 1.0;
  double h_phi = 1.0;
  double h_pi = 1.0;
  bool pi_uses_h_pi = false;
};

/// (eta_Phi, eta_Pi) for one mode, asymptotic for h_phi h_pi >> 1.
std::pair<double, double> qfield_mode_relevance(double k, const QFieldState& st,
                                                const QFieldSmearing& sm);

enum class QFieldQuadrature { phi, pi };

/// Product rule over distinct modes: relevance of Phi_{k1}...Phi_{kn} is the
/// product of the single-mode relevances.
double qfield_product_relevance(const std::vector<double>& ks,
                                const std::vector<QFieldQuadrature>& which, const QFieldState& st,
                                const QFieldSmearing& sm);

/// Wilson rescaling k -> k/s: mass m2 -> m2/s^2, temperature beta -> s beta,
/// cutoff restored. Inverse rescale recovers the input exactly.
template <typename Scalar>
struct WilsonParams {
  Scalar m2{};
  Scalar beta{};
  Scalar cutoff{};

  friend bool operator==(const WilsonParams&, const WilsonParams&) = default;
};

template <typename Scalar>
WilsonParams<Scalar> wilson_rescale(const WilsonParams<Scalar>& p, const Scalar& s) {
  if (!(s > Scalar(0))) throw DomainError("wilson_rescale: scale must be positive");
  return {p.m2 / (s * s), s * p.beta, p.cutoff};
}

enum class RadialMeasure { two_ray, single_ray };  // d = 1 only; two_ray is default

/// m_phys^2 = m^2 + (lambda/2) int_{ir}^{uv} Omega_{d-1} k^{d-1} dk / (2 omega_k).
double mass_shell_shift(double m, double lambda, double uv_cutoff, double ir_scale, int d,
                        RadialMeasure measure = RadialMeasure::two_ray);

}  // namespace rlab::gauss
