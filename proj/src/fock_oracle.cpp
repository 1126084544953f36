#include "rlab/fock_oracle.hpp"

#include <cmath>

#include "rlab/errors.hpp"
#include "rlab/util.hpp"

namespace rlab::gauss {

namespace {

// amplifier band: coefficients over t of Amp_G(|rj><rk|) on |rj+t><rk+t|,
// written into out[rk + t]; log_prefactor shifts the whole band (used to fold
// in the loss coefficient). All terms are positive; the running-ratio product
// keeps every intermediate in range.
void add_amp_band(int rj, int rk, double g, double log_prefactor, Eigen::VectorXd& out) {
  const int ambient = static_cast<int>(out.size());
  const double x = 1.0 - 1.0 / g;
  double term = std::exp(log_prefactor - (0.5 * (rj + rk) + 1.0) * std::log(g));
  const int tmax = ambient - std::max(rj, rk);
  for (int t = 0; t < tmax; ++t) {
    out(rk + t) += term;
    term *= x * std::sqrt(static_cast<double>(rj + t + 1) * (rk + t + 1)) / (t + 1);
  }
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Eigen::VectorXd channel_band(int j, int k, double w, int ambient) {
  const double g = 1.0 + w;
  const double log_eta = -std::log(g);        // loss transmissivity 1/G
  const double log_x = std::log(w) - std::log(g);  // 1 - eta
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ambient);
  for (int l = 0; l <= std::min(j, k); ++l) {
    const double log_loss = 0.5 * (log_binomial(j, l) + log_binomial(k, l)) + l * log_x +
                            (0.5 * (j + k) - l) * log_eta;
    add_amp_band(j - l, k - l, g, log_loss, out);
  }
  return out;
}

double thermal_log_weight(double nbar, int n) {
  // log of (1-q) q^n with q = nbar/(1+nbar)
  const double log_q = std::log(nbar) - std::log1p(nbar);
  return -std::log1p(nbar) + n * log_q;
}

// logarithmic mean of thermal weights exp(la), exp(lb) computed in log space
double log_mean_from_logs(double la, double lb) {
  if (std::abs(la - lb) < 1e-8) {
    return std::exp(0.5 * (la + lb)) * (1.0 + (la - lb) * (la - lb) / 8.0);
  }
  return (std::exp(la) - std::exp(lb)) / (la - lb);
}

}  // namespace

Eigen::VectorXd noise_channel_band(int j, int k, double w, int ambient) {
  if (j < 0 || k < 0 || j < k) throw ValidationError("noise_channel_band: need j >= k >= 0");
  if (!(w > 0.0)) throw DomainError("noise_channel_band: noise must be positive");
  return channel_band(j, k, w, ambient);
}

double exact_quadratic_thermal_eta(double uv, double sigma) {
  const double out = uv + sigma * sigma;
  return (uv * uv - 1.0) / (out * out - 1.0);
}

double exact_quadratic_squeeze_eta(double uv, double sigma) {
  const double out = uv + sigma * sigma;
  const double s = 0.5 * std::log((uv + 1.0) / (uv - 1.0));
  const double sp = 0.5 * std::log((out + 1.0) / (out - 1.0));
  return (sp * uv) / (s * out);
}

FockOracleResult fock_gaussian_pencil(double uv, double sigma, const FockOracleParams& params) {
  if (!(uv > 1.0)) throw DomainError("fock_gaussian_pencil: need uv > 1");
  if (!(sigma > 0.0)) throw DomainError("fock_gaussian_pencil: need sigma > 0");
  if (params.cutoff < params.max_offset + 2 || params.max_offset < 0) {
    throw ValidationError("fock_gaussian_pencil: bad cutoff/offset request");
  }
  const double w = 0.5 * sigma * sigma;
  const double nbar = 0.5 * (uv - 1.0);
  const double nbar_out = nbar + w;
  const int n = params.cutoff;
  const int ambient =
      static_cast<int>(params.tail_factor * std::max(w, 1.0) + 8.0 * n + 200.0);

  FockOracleResult res;
  res.cutoff = n;
  res.ambient = ambient;
  res.noise_w = w;
  res.nbar = nbar;
  res.etas_by_offset.resize(params.max_offset + 1);

  // inverse logarithmic means of the output thermal weights, per offset
  const double lq_out = std::log(nbar_out) - std::log1p(nbar_out);
  Eigen::VectorXd log_po(ambient + params.max_offset);
  for (int m = 0; m < log_po.size(); ++m) log_po(m) = thermal_log_weight(nbar_out, m);

  for (int d = 0; d <= params.max_offset; ++d) {
    const int nk = n - d;
    Eigen::MatrixXd c(nk, ambient);
    parallel_for(nk, [&](int k) { c.row(k) = channel_band(k + d, k, w, ambient).transpose(); });

    // weights 1 / L(p_out[m+d], p_out[m]); for thermal states
    // L = p_out[m] (q^d - 1)/(d log q) when d > 0
    Eigen::VectorXd linv(ambient);
    if (d == 0) {
      for (int m = 0; m < ambient; ++m) linv(m) = std::exp(-log_po(m));
    } else {
      const double fac = (std::exp(d * lq_out) - 1.0) / (d * lq_out);
      for (int m = 0; m < ambient; ++m) linv(m) = std::exp(-log_po(m)) / fac;
    }

    Eigen::MatrixXd f = c * linv.asDiagonal() * c.transpose();
    f = 0.5 * (f + f.transpose()).eval();
    Eigen::VectorXd kdiag(nk);
    for (int k = 0; k < nk; ++k) {
      kdiag(k) =
          1.0 / log_mean_from_logs(thermal_log_weight(nbar, k + d), thermal_log_weight(nbar, k));
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        f, Eigen::MatrixXd(kdiag.asDiagonal()));
    if (es.info() != Eigen::Success) {
      throw NumericError("fock_gaussian_pencil: generalized eigensolve failed");
    }
    res.etas_by_offset[d] = es.eigenvalues().reverse();
  }
  return res;
}

}  // namespace rlab::gauss
