#include "rlab/eigenrelevance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/kubo_mori.hpp"
#include "rlab/util.hpp"

namespace rlab {

std::vector<Eigen::MatrixXcd> hermitian_basis(int dim) {
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(static_cast<size_t>(dim) * dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
      s(i, j) = inv_sqrt2;
      s(j, i) = inv_sqrt2;
      basis.push_back(std::move(s));
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
      a(i, j) = std::complex<double>(0.0, inv_sqrt2);
      a(j, i) = std::complex<double>(0.0, -inv_sqrt2);
      basis.push_back(std::move(a));
    }
  }
  return basis;
}

Eigen::VectorXd to_basis_coords(const Eigen::MatrixXcd& h) {
  const int dim = static_cast<int>(h.rows());
  Eigen::VectorXd c(dim * dim);
  const double sqrt2 = std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < dim; ++i) c(idx++) = h(i, i).real();
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      c(idx++) = sqrt2 * h(i, j).real();
      c(idx++) = sqrt2 * h(i, j).imag();
    }
  }
  return c;
}

Eigen::MatrixXcd from_basis_coords(const Eigen::VectorXd& coords, int dim) {
  if (coords.size() != dim * dim) throw DimensionError("from_basis_coords: size mismatch");
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < dim; ++i) h(i, i) = coords(idx++);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = coords(idx++) * inv_sqrt2;
      const double im = coords(idx++) * inv_sqrt2;
      h(i, j) = std::complex<double>(re, im);
      h(j, i) = std::complex<double>(re, -im);
    }
  }
  return h;
}

namespace {

void symmetrize_logged(Eigen::MatrixXd& m, double& asymmetry) {
  asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  m = 0.5 * (m + m.transpose()).eval();
}

}  // namespace

RelevancePencil relevance_operator(const DensityMatrix& rho, const KrausChannel& channel,
                                   int dense_cap) {
  const int d = rho.dim();
  if (channel.dim_in() != d) throw DimensionError("relevance_operator: channel/state mismatch");
  const int n = d * d;
  if (n > dense_cap) {
    std::ostringstream os;
    os << "relevance_operator: operator-space dimension " << n << " exceeds dense cap "
       << dense_cap;
    throw ConfigError(os.str());
  }
  const DensityMatrix out = channel.apply(rho);
  const auto basis = hermitian_basis(d);
  RelevancePencil p;
  p.kind = OperatorSpaceKind::quantum;
  p.op_dim = n;
  p.state_dim = d;
  p.f.resize(n, n);
  p.k.resize(n, n);
  parallel_for(n, [&](int b) {
    const Eigen::MatrixXcd eb = channel.apply_matrix(basis[b]);
    const Eigen::MatrixXcd fb = channel.adjoint_apply(omega_inverse(out, eb));
    p.f.col(b) = to_basis_coords(fb);
    p.k.col(b) = to_basis_coords(omega_inverse(rho, basis[b]));
  });
  symmetrize_logged(p.f, p.asymmetry_f);
  symmetrize_logged(p.k, p.asymmetry_k);
  return p;
}

RelevancePencil relevance_operator(const ClassicalState& rho, const StochasticChannel& channel,
                                   int dense_cap) {
  const int n = rho.size();
  if (channel.dim_in() != n) throw DimensionError("relevance_operator: channel/state mismatch");
  if (n > dense_cap) {
    std::ostringstream os;
    os << "relevance_operator: grid size " << n << " exceeds dense cap " << dense_cap;
    throw ConfigError(os.str());
  }
  const ClassicalState out = channel.apply(rho);
  RelevancePencil p;
  p.kind = OperatorSpaceKind::classical;
  p.op_dim = n;
  p.state_dim = n;
  const Eigen::MatrixXd& m = channel.matrix();
  const Eigen::VectorXd inv_q = out.probs().cwiseInverse();
  p.f = m.transpose() * inv_q.asDiagonal() * m;
  p.k = rho.probs().cwiseInverse().asDiagonal();
  symmetrize_logged(p.f, p.asymmetry_f);
  p.asymmetry_k = 0.0;
  return p;
}

RelevanceSpectrum solve_spectrum(const RelevancePencil& pencil, int count) {
  const int n = pencil.op_dim;
  if (count < 1 || count > n) throw ValidationError("solve_spectrum: bad count");

  // Cholesky with diagonal jitter escalation; jitter perturbs near-degenerate
  // relevance values, so its use is reported on the spectrum.
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
  const double scale = pencil.k.diagonal().cwiseAbs().maxCoeff();
  for (double j : {0.0, 1e-14, 1e-12, 1e-10}) {
    jitter = j * scale;
    Eigen::MatrixXd k = pencil.k;
    if (jitter > 0.0) k.diagonal().array() += jitter;
    llt.compute(k);
    if (llt.info() == Eigen::Success) break;
  }
  if (llt.info() != Eigen::Success) {
    throw RankError("solve_spectrum: K is not positive definite (Cholesky failed)");
  }

  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd s = l.triangularView<Eigen::Lower>().solve(pencil.f);
  s = l.triangularView<Eigen::Lower>().solve(s.transpose().eval());
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericError("solve_spectrum: eigensolver failed");

  RelevanceSpectrum spec;
  spec.kind = pencil.kind;
  spec.state_dim = pencil.state_dim;
  spec.jitter_used = jitter;
  spec.etas.resize(count);
  spec.features.resize(n, count);
  spec.observables.resize(n, count);
  spec.degenerate_block.assign(count, 0);
  spec.threshold = count - 1;

  double excess = 0.0;
  for (int i = 0; i < count; ++i) {
    const int src = n - 1 - i;  // descending order
    double eta = es.eigenvalues()(src);
    if (eta < 0.0) {
      excess = std::max(excess, -eta);
      if (eta > -1e-9) eta = 0.0;
    } else if (eta > 1.0) {
      excess = std::max(excess, eta - 1.0);
      if (eta < 1.0 + 1e-9) eta = 1.0;
    }
    spec.etas(i) = eta;
    Eigen::VectorXd x = es.eigenvectors().col(src);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    int imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x(imax) < 0.0) x = -x;
    spec.features.col(i) = x;
    spec.observables.col(i) = pencil.k * x;
  }
  spec.clamp_excess = excess;

  int block = 0;
  for (int i = 1; i < count; ++i) {
    if (spec.etas(i - 1) - spec.etas(i) >= 1e-9) ++block;
    spec.degenerate_block[i] = block;
  }
  return spec;
}

void RelevanceSpectrum::center_observables(const Eigen::VectorXd& state_coords) {
  if (state_coords.size() != observables.rows()) {
    throw DimensionError("center_observables: state coordinate size mismatch");
  }
  // subtracting Tr(rho A) * identity; the identity's coordinates are all-ones
  // on the unit directions of the basis
  Eigen::VectorXd id_coords = Eigen::VectorXd::Zero(observables.rows());
  if (kind == OperatorSpaceKind::classical) {
    id_coords.setOnes();
  } else {
    id_coords.head(state_dim).setOnes();
  }
  for (int i = 0; i < observables.cols(); ++i) {
    const double mean = state_coords.dot(observables.col(i));
    observables.col(i) -= mean * id_coords;
  }
}

void set_threshold_by_index(RelevanceSpectrum& s, int n) {
  if (n < 0 || n >= s.etas.size()) throw ValidationError("set_threshold_by_index: out of range");
  s.threshold = n;
}

void set_threshold_by_min_relevance(RelevanceSpectrum& s, double eta_min) {
  int last = -1;
  for (int i = 0; i < s.etas.size(); ++i) {
    if (s.etas(i) >= eta_min) last = i;
  }
  if (last < 0) throw ValidationError("set_threshold_by_min_relevance: no direction retained");
  s.threshold = last;
}

Eigen::VectorXd project_relevant(const RelevanceSpectrum& s, const Eigen::VectorXd& y_coords) {
  if (y_coords.size() != s.features.rows()) {
    throw DimensionError("project_relevant: coordinate size mismatch");
  }
  Eigen::VectorXd alpha(s.threshold + 1);
  for (int j = 0; j <= s.threshold; ++j) {
    alpha(j) = s.observables.col(j).dot(y_coords);
  }
  return alpha;
}

EquivalenceWitness equivalent_first_order(const RelevanceSpectrum& s,
                                          const Eigen::VectorXd& rho1_coords,
                                          const Eigen::VectorXd& rho2_coords, double tol) {
  if (rho1_coords.size() != s.observables.rows() || rho2_coords.size() != s.observables.rows()) {
    throw DimensionError("equivalent_first_order: coordinate size mismatch");
  }
  const Eigen::VectorXd diff = rho1_coords - rho2_coords;
  EquivalenceWitness w;
  w.equivalent = true;
  for (int i = 0; i <= s.threshold; ++i) {
    const double v = s.observables.col(i).dot(diff);
    if (std::abs(v) > std::abs(w.worst_value)) {
      w.worst_value = v;
      w.worst_index = i;
    }
    if (std::abs(v) > tol) w.equivalent = false;
  }
  return w;
}

void export_spectrum_csv(const RelevanceSpectrum& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("export_spectrum_csv: cannot open " + path);
  out << "index,eta";
  for (int c = 0; c < s.features.rows(); ++c) out << ",x" << c;
  out << "\n";
  for (int i = 0; i < s.etas.size(); ++i) {
    out << i << "," << format_full(s.etas(i));
    for (int c = 0; c < s.features.rows(); ++c) out << "," << format_full(s.features(c, i));
    out << "\n";
  }
}

}  // namespace rlab
