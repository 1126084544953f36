#include "rlab/channels.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/kubo_mori.hpp"

namespace rlab {

StochasticChannel::StochasticChannel(Eigen::MatrixXd matrix, Eigen::VectorXd grid_in,
                                     Eigen::VectorXd grid_out)
    : m_(std::move(matrix)), grid_in_(std::move(grid_in)), grid_out_(std::move(grid_out)) {
  if (m_.cols() != grid_in_.size() || m_.rows() != grid_out_.size()) {
    throw DimensionError("StochasticChannel: matrix shape does not match grids");
  }
  if ((m_.array() < 0.0).any()) {
    throw ValidationError("StochasticChannel: negative entries");
  }
  for (int j = 0; j < m_.cols(); ++j) {
    const double s = m_.col(j).sum();
    if (std::abs(s - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "StochasticChannel: column " << j << " sums to " << s;
      throw ValidationError(os.str());
    }
  }
}

ClassicalState StochasticChannel::apply(const ClassicalState& rho) const {
  if (rho.size() != dim_in()) throw DimensionError("StochasticChannel::apply: size mismatch");
  return ClassicalState(grid_out_, m_ * rho.probs());
}

Eigen::VectorXd StochasticChannel::apply_vector(const Eigen::VectorXd& v) const {
  if (v.size() != dim_in()) throw DimensionError("StochasticChannel::apply_vector: size mismatch");
  return m_ * v;
}

Eigen::VectorXd StochasticChannel::adjoint_apply(const Eigen::VectorXd& b) const {
  if (b.size() != dim_out()) throw DimensionError("StochasticChannel::adjoint: size mismatch");
  return m_.transpose() * b;
}

StochasticChannel build_gaussian_map(const Eigen::VectorXd& grid_in,
                                     const Eigen::VectorXd& grid_out, double scale, double sigma,
                                     CoarseGridPolicy policy) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian map: sigma must be positive");
  if (grid_out.size() < 2) throw ConfigError("gaussian map: output grid too small");
  const double dx_out = grid_out(1) - grid_out(0);
  if (policy == CoarseGridPolicy::reject && dx_out > sigma / 3.0) {
    std::ostringstream os;
    os << "gaussian map: grid spacing " << dx_out << " too coarse for sigma " << sigma
       << " (need dx <= sigma/3)";
    throw ConfigError(os.str());
  }
  Eigen::MatrixXd m(grid_out.size(), grid_in.size());
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int j = 0; j < grid_in.size(); ++j) {
    const double c = scale * grid_in(j);
    for (int i = 0; i < grid_out.size(); ++i) {
      const double d = grid_out(i) - c;
      m(i, j) = std::exp(-d * d * inv2s2);
    }
    const double s = m.col(j).sum();
    if (!(s > 0.0)) throw ConfigError("gaussian map: column has no support on the output grid");
    m.col(j) /= s;
  }
  return StochasticChannel(std::move(m), grid_in, grid_out);
}

StochasticChannel build_gaussian_convolution(const Eigen::VectorXd& grid, double sigma,
                                             CoarseGridPolicy policy) {
  return build_gaussian_map(grid, grid, 1.0, sigma, policy);
}

KrausChannel::KrausChannel(std::vector<Eigen::MatrixXcd> kraus_ops) : ks_(std::move(kraus_ops)) {
  if (ks_.empty()) throw ValidationError("KrausChannel: empty Kraus set");
  const auto rows = ks_.front().rows();
  const auto cols = ks_.front().cols();
  for (const auto& k : ks_) {
    if (k.rows() != rows || k.cols() != cols) {
      throw DimensionError("KrausChannel: inconsistent Kraus operator shapes");
    }
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(cols, cols);
  for (const auto& k : ks_) acc += k.adjoint() * k;
  const double dev = (acc - Eigen::MatrixXcd::Identity(cols, cols)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    std::ostringstream os;
    os << "KrausChannel: not trace preserving, sum K^+K deviates from identity by " << dev;
    throw ValidationError(os.str());
  }
}

KrausChannel KrausChannel::identity(int dim) {
  return KrausChannel({Eigen::MatrixXcd::Identity(dim, dim)});
}

Eigen::MatrixXcd KrausChannel::apply_matrix(const Eigen::MatrixXcd& x) const {
  if (x.rows() != dim_in() || x.cols() != dim_in()) {
    throw DimensionError("KrausChannel::apply_matrix: dimension mismatch");
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_out(), dim_out());
  for (const auto& k : ks_) out += k * x * k.adjoint();
  return out;
}

DensityMatrix KrausChannel::apply(const DensityMatrix& rho, double rank_floor) const {
  Eigen::MatrixXcd out = apply_matrix(rho.matrix());
  out = 0.5 * (out + out.adjoint());
  // renormalize round-off on the unit trace before revalidation
  out /= out.trace().real();
  return DensityMatrix(std::move(out), rank_floor);
}

Eigen::MatrixXcd KrausChannel::adjoint_apply(const Eigen::MatrixXcd& b) const {
  if (b.rows() != dim_out() || b.cols() != dim_out()) {
    throw DimensionError("KrausChannel::adjoint_apply: dimension mismatch");
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_in(), dim_in());
  for (const auto& k : ks_) out += k.adjoint() * b * k;
  return out;
}

KrausChannel partial_trace_channel(const std::vector<int>& dims, const std::vector<int>& keep) {
  if (dims.empty()) throw ValidationError("partial_trace_channel: no subsystems");
  for (int d : dims) {
    if (d < 1) throw ValidationError("partial_trace_channel: subsystem dimension < 1");
  }
  std::set<int> keep_set(keep.begin(), keep.end());
  if (keep_set.empty()) throw ValidationError("partial_trace_channel: empty keep set");
  for (int k : keep_set) {
    if (k < 0 || k >= static_cast<int>(dims.size())) {
      throw ValidationError("partial_trace_channel: keep index out of range");
    }
  }
  const int n = static_cast<int>(dims.size());
  int dim_full = 1, dim_keep = 1, dim_discard = 1;
  for (int s = 0; s < n; ++s) {
    dim_full *= dims[s];
    (keep_set.count(s) ? dim_keep : dim_discard) *= dims[s];
  }
  std::vector<Eigen::MatrixXcd> ops(dim_discard,
                                    Eigen::MatrixXcd::Zero(dim_keep, dim_full));
  // row-major multi-index over subsystems; split each full index into its
  // kept and discarded parts
  for (int idx = 0; idx < dim_full; ++idx) {
    int rest = idx, a = 0, b = 0;
    for (int s = 0; s < n; ++s) {
      int stride = 1;
      for (int t = s + 1; t < n; ++t) stride *= dims[t];
      const int js = rest / stride;
      rest %= stride;
      if (keep_set.count(s)) {
        a = a * dims[s] + js;
      } else {
        b = b * dims[s] + js;
      }
    }
    ops[b](a, idx) = 1.0;
  }
  return KrausChannel(std::move(ops));
}

Eigen::MatrixXd GaussianChannelSpec::symplectic_form(int n_modes) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  s.topRightCorner(n_modes, n_modes) = Eigen::MatrixXd::Identity(n_modes, n_modes);
  s.bottomLeftCorner(n_modes, n_modes) = -Eigen::MatrixXd::Identity(n_modes, n_modes);
  return s;
}

void GaussianChannelSpec::validate(double tol) const {
  if (x_matrix.rows() != x_matrix.cols() || y_matrix.rows() != y_matrix.cols() ||
      x_matrix.rows() != y_matrix.rows()) {
    throw DimensionError("GaussianChannelSpec: X and Y must be square of equal size");
  }
  if ((y_matrix - y_matrix.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("GaussianChannelSpec: Y is not symmetric");
  }
  if (quantum) {
    const int two_n = static_cast<int>(x_matrix.rows());
    if (two_n % 2 != 0) {
      throw DimensionError("GaussianChannelSpec: quantum spec needs even dimension");
    }
    const Eigen::MatrixXd s = symplectic_form(two_n / 2);
    const std::complex<double> im(0.0, 1.0);
    Eigen::MatrixXcd cp = y_matrix.cast<std::complex<double>>() +
                          im * (s - x_matrix.transpose() * s * x_matrix).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (cp + cp.adjoint()));
    if (es.eigenvalues()(0) < -tol) {
      std::ostringstream os;
      os << "GaussianChannelSpec: complete positivity violated, min eig "
         << es.eigenvalues()(0);
      throw ValidationError(os.str());
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (y_matrix + y_matrix.transpose()));
    if (es.eigenvalues()(0) < -tol) {
      throw ValidationError("GaussianChannelSpec: classical noise matrix not PSD");
    }
  }
}

GaussianChannelSpec particle_noise_spec(double sigma_x, double sigma_p) {
  GaussianChannelSpec spec;
  spec.x_matrix = Eigen::MatrixXd::Identity(2, 2);
  spec.y_matrix = Eigen::MatrixXd::Zero(2, 2);
  // gamma convention: gamma_xx = <x^2>, so v^2 -> v^2 + sigma_x^2 adds sigma_x^2/2
  spec.y_matrix(0, 0) = 0.5 * sigma_x * sigma_x;
  spec.y_matrix(1, 1) = 0.5 * sigma_p * sigma_p;
  spec.quantum = true;
  spec.sigma_x = sigma_x;
  spec.sigma_p = sigma_p;
  return spec;
}

RecoveryMap::RecoveryMap(DensityMatrix rho, KrausChannel channel, double rank_floor)
    : rho_(std::move(rho)), channel_(std::move(channel)), out_(channel_.apply(rho_, rank_floor)) {}

Eigen::MatrixXcd RecoveryMap::apply(const Eigen::MatrixXcd& y) const {
  return omega_apply(rho_, channel_.adjoint_apply(omega_inverse(out_, y)));
}

Eigen::MatrixXcd recovery_apply(const DensityMatrix& rho, const KrausChannel& channel,
                                const Eigen::MatrixXcd& y) {
  const DensityMatrix out = channel.apply(rho);
  return omega_apply(rho, channel.adjoint_apply(omega_inverse(out, y)));
}

Eigen::VectorXd recovery_apply(const ClassicalState& rho, const StochasticChannel& channel,
                               const Eigen::VectorXd& y) {
  const ClassicalState out = channel.apply(rho);
  return omega_apply(rho, channel.adjoint_apply(omega_inverse(out, y)));
}

}  // namespace rlab
