#include "rlab/gaussian_sector.hpp"

#include <cmath>
#include <sstream>

#include "rlab/util.hpp"

namespace rlab::gauss {

FieldLattice::FieldLattice(int d_, double spacing_, int extent_)
    : d(d_), spacing(spacing_), extent(extent_) {
  if (d < 1 || d > 3) throw ValidationError("FieldLattice: d must be 1, 2 or 3");
  if (!(spacing > 0.0)) throw ValidationError("FieldLattice: spacing must be positive");
  if (extent < 1) throw ValidationError("FieldLattice: need at least 1 site per dimension");
}

long FieldLattice::mode_count() const {
  long n = 1;
  for (int i = 0; i < d; ++i) n *= extent;
  return n;
}

Eigen::VectorXd FieldLattice::mode_k2() const {
  // one-dimensional DFT wavenumbers 2 pi n / (extent * spacing),
  // n in [-extent/2, extent/2)
  Eigen::VectorXd k1(extent);
  const double dk = 2.0 * M_PI / (extent * spacing);
  for (int i = 0; i < extent; ++i) {
    const int n = (i <= (extent - 1) / 2) ? i : i - extent;
    k1(i) = dk * n;
  }
  const long total = mode_count();
  Eigen::VectorXd k2(total);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    double acc = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const int comp = static_cast<int>(rest % extent);
      rest /= extent;
      acc += k1(comp) * k1(comp);
    }
    k2(idx) = acc;
  }
  return k2;
}

namespace {

// single-mode Hermite relevance (1 + a_k h_eff^2 e^{k^2 sigma^2})^{-n}, with
// the kernel folded into an effective noise h_eff = h / X_k
double mode_eta(double k2, int n, const ClassicalFieldTheory& th, const SmearingParams& sm,
                int d) {
  const double xk = sm.kernel(k2, d);
  const double noise = sm.h * sm.h / (xk * xk);
  const double z = th.a(k2) * noise;
  if (!std::isfinite(z)) return 0.0;
  return std::pow(1.0 + z, -n);
}

}  // namespace

double classical_mode_relevance(const std::vector<Eigen::VectorXd>& modes,
                                const std::vector<int>& degrees, const ClassicalFieldTheory& th,
                                const SmearingParams& sm) {
  if (modes.size() != degrees.size() || modes.empty()) {
    throw ValidationError("classical_mode_relevance: modes/degrees mismatch");
  }
  for (size_t i = 0; i < modes.size(); ++i) {
    if (degrees[i] < 1) throw DomainError("classical_mode_relevance: degrees must be positive");
    for (size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i].size() == modes[j].size() &&
          (modes[i] - modes[j]).cwiseAbs().maxCoeff() < 1e-12) {
        throw DomainError("classical_mode_relevance: modes must be distinct");
      }
    }
  }
  double eta = 1.0;
  for (size_t i = 0; i < modes.size(); ++i) {
    eta *= mode_eta(modes[i].squaredNorm(), degrees[i], th, sm,
                    static_cast<int>(modes[i].size()));
  }
  return eta;
}

namespace {

// weight w_k = a_k^{-2} (phi^2) or k^4 a_k^{-2} (phi dd phi); relevance is
// sum w_k eta1_{k,2} / sum w_k
double weighted_field_relevance(const FieldLattice& lat, const ClassicalFieldTheory& th,
                                const SmearingParams& sm, bool laplacian_weight) {
  if (!(th.m > 0.0)) {
    // with no mass the k = 0 term of the phi^2 sums is singular
    if (!laplacian_weight) {
      throw SingularModeError("phi_squared_relevance: massless zero mode is singular");
    }
  }
  const Eigen::VectorXd k2 = lat.mode_k2();
  double num = 0.0, den = 0.0;
  for (long i = 0; i < k2.size(); ++i) {
    const double a = th.a(k2(i));
    double w;
    if (a > 0.0) {
      w = 1.0 / (a * a);
      if (laplacian_weight) w *= k2(i) * k2(i);
    } else if (laplacian_weight && k2(i) == 0.0) {
      w = 1.0 / (th.beta * th.beta);  // k^4 / a_k^2 -> 1/beta^2 as k -> 0 at m = 0
    } else {
      throw SingularModeError("field relevance: mode with a_k <= 0");
    }
    num += w * mode_eta(k2(i), 2, th, sm, lat.d);
    den += w;
  }
  if (!(den > 0.0)) throw SingularModeError("field relevance: degenerate weight sum");
  return num / den;
}

}  // namespace

double phi_squared_relevance(const FieldLattice& lat, const ClassicalFieldTheory& th,
                             const SmearingParams& sm) {
  return weighted_field_relevance(lat, th, sm, false);
}

double phi_laplacian_relevance(const FieldLattice& lat, const ClassicalFieldTheory& th,
                               const SmearingParams& sm) {
  return weighted_field_relevance(lat, th, sm, true);
}

namespace {

ScalingFit fit_scaling(const std::vector<double>& xs, const std::vector<double>& etas,
                       double nonlinearity_tol) {
  Eigen::VectorXd lx(static_cast<int>(xs.size())), ly(static_cast<int>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(etas[i] > 0.0)) throw WindowError("scaling fit: relevance underflowed to zero");
    lx(static_cast<int>(i)) = std::log(xs[i]);
    ly(static_cast<int>(i)) = std::log(etas[i]);
  }
  const LineFit f = fit_line(lx, ly);
  if (f.max_abs_residual > nonlinearity_tol) {
    std::ostringstream os;
    os << "scaling fit: window outside the asymptotic regime (log-log residual "
       << f.max_abs_residual << " > " << nonlinearity_tol << ")";
    throw WindowError(os.str());
  }
  ScalingFit out;
  out.slope = f.slope;
  out.max_residual = f.max_abs_residual;
  out.abscissae = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<int>(xs.size()));
  out.etas = Eigen::Map<const Eigen::VectorXd>(etas.data(), static_cast<int>(etas.size()));
  return out;
}

}  // namespace

ScalingFit scaling_exponent(FieldObservable obs, const FieldLattice& lat,
                            const ClassicalFieldTheory& th, double h,
                            const std::vector<double>& sigmas, double nonlinearity_tol) {
  if (sigmas.size() < 3) throw ValidationError("scaling_exponent: need at least 3 sigma values");
  const double extent_len = lat.extent * lat.spacing;
  for (double s : sigmas) {
    if (!(s * th.m > 1.0) || !(s < extent_len)) {
      std::ostringstream os;
      os << "scaling_exponent: sigma " << s << " outside 1/m << sigma << lattice extent";
      throw WindowError(os.str());
    }
  }
  std::vector<double> etas(sigmas.size());
  parallel_for(static_cast<int>(sigmas.size()), [&](int i) {
    SmearingParams sm;
    sm.sigma = sigmas[i];
    sm.h = h;
    etas[i] = obs == FieldObservable::phi2 ? phi_squared_relevance(lat, th, sm)
                                           : phi_laplacian_relevance(lat, th, sm);
  });
  return fit_scaling(sigmas, etas, nonlinearity_tol);
}

ScalingFit scaling_exponent_in_h(FieldObservable obs, const FieldLattice& lat,
                                 const ClassicalFieldTheory& th, double sigma,
                                 const std::vector<double>& hs, double nonlinearity_tol) {
  if (hs.size() < 3) throw ValidationError("scaling_exponent_in_h: need at least 3 h values");
  std::vector<double> etas(hs.size());
  parallel_for(static_cast<int>(hs.size()), [&](int i) {
    SmearingParams sm;
    sm.sigma = sigma;
    sm.h = hs[i];
    etas[i] = obs == FieldObservable::phi2 ? phi_squared_relevance(lat, th, sm)
                                           : phi_laplacian_relevance(lat, th, sm);
  });
  return fit_scaling(hs, etas, nonlinearity_tol);
}

double QuantumGaussianState::s() const {
  if (!(u > 0.0) || !(v > 0.0) || !(u * v > 1.0)) {
    throw DomainError("QuantumGaussianState: need u, v > 0 and uv > 1");
  }
  const double uv = u * v;
  return 0.5 * std::log((uv + 1.0) / (uv - 1.0));  // arccoth
}

double QuantumGaussianState::alpha_const() const {
  return std::log(std::sqrt(u * u * v * v - 1.0));
}

ParticleRelevance quantum_particle_relevance(const QuantumGaussianState& st, double sigma_x,
                                             double sigma_p) {
  if (!(sigma_x >= 0.0) || !(sigma_p >= 0.0)) {
    throw DomainError("quantum_particle_relevance: noise must be nonnegative");
  }
  const double s = st.s();
  const double u = st.u, v = st.v;
  const double up = std::sqrt(u * u + sigma_p * sigma_p);
  const double vp = std::sqrt(v * v + sigma_x * sigma_x);
  const double sp = 0.5 * std::log((up * vp + 1.0) / (up * vp - 1.0));

  ParticleRelevance r;
  r.eta_x = v / (s * u * sigma_x * sigma_x);
  r.eta_p = u / (s * v * sigma_p * sigma_p);
  // the linear sector closes on the displacement family, giving the exact
  // ratios below; the asymptotic forms above follow for large noise
  r.eta_x_exact = (v * sp * up) / (s * u * vp);
  r.eta_p_exact = (u * sp * vp) / (s * v * up);
  r.quad_x = {1.0, 0.0, -0.5 * s * u / v};
  r.quad_p = {0.0, 1.0, -0.5 * s * v / u};
  r.quad_eta_x = std::pow(u, 4) / std::pow(sigma_p, 4);
  r.quad_eta_p = std::pow(v, 4) / std::pow(sigma_x, 4);
  return r;
}

std::pair<double, double> qfield_mode_relevance(double k, const QFieldState& st,
                                                const QFieldSmearing& sm) {
  const double w = st.omega(k);
  const double bw = st.beta * w;
  const double base = 0.5 * bw / std::tanh(0.5 * bw);
  const double blow = std::exp(k * k * sm.sigma * sm.sigma);
  const double h_pi_term = sm.pi_uses_h_pi ? sm.h_pi : sm.h_phi;
  const double eta_phi = 1.0 / (base + st.beta * w * w * sm.h_phi * sm.h_phi * blow);
  const double eta_pi = 1.0 / (base + st.beta * h_pi_term * h_pi_term * blow);
  return {eta_phi, eta_pi};
}

double qfield_product_relevance(const std::vector<double>& ks,
                                const std::vector<QFieldQuadrature>& which, const QFieldState& st,
                                const QFieldSmearing& sm) {
  if (ks.size() != which.size() || ks.empty()) {
    throw ValidationError("qfield_product_relevance: ks/which mismatch");
  }
  for (size_t i = 0; i < ks.size(); ++i) {
    for (size_t j = i + 1; j < ks.size(); ++j) {
      if (std::abs(ks[i] - ks[j]) < 1e-12) {
        throw DomainError("qfield_product_relevance: momenta must be distinct");
      }
    }
  }
  double eta = 1.0;
  for (size_t i = 0; i < ks.size(); ++i) {
    const auto [ephi, epi] = qfield_mode_relevance(ks[i], st, sm);
    eta *= which[i] == QFieldQuadrature::phi ? ephi : epi;
  }
  return eta;
}

double mass_shell_shift(double m, double lambda, double uv_cutoff, double ir_scale, int d,
                        RadialMeasure measure) {
  if (d < 1 || d > 3) throw ValidationError("mass_shell_shift: d must be 1, 2 or 3");
  if (!(m > 0.0)) throw ValidationError("mass_shell_shift: mass must be positive");
  if (!(ir_scale >= 0.0) || !(uv_cutoff >= ir_scale)) {
    throw ValidationError("mass_shell_shift: inverted bounds");
  }
  if (measure == RadialMeasure::single_ray && d != 1) {
    throw ValidationError("mass_shell_shift: single-ray measure only applies in d = 1");
  }
  if (lambda == 0.0 || uv_cutoff == ir_scale) return m * m;
  double sphere = 0.0;
  switch (d) {
    case 1:
      sphere = measure == RadialMeasure::two_ray ? 2.0 : 1.0;
      break;
    case 2:
      sphere = 2.0 * M_PI;
      break;
    case 3:
      sphere = 4.0 * M_PI;
      break;
  }
  const double integral = adaptive_simpson(
      [&](double k) {
        return sphere * std::pow(k, d - 1) / (2.0 * std::sqrt(k * k + m * m));
      },
      ir_scale, uv_cutoff, 1e-13);
  return m * m + 0.5 * lambda * integral;
}

}  // namespace rlab::gauss
