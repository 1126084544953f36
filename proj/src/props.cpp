#include "rlab/props.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/kubo_mori.hpp"
#include "rlab/util.hpp"

namespace rlab::props {

namespace {

Eigen::MatrixXcd random_complex_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = std::complex<double>(n01(rng), n01(rng));
  }
  return m;
}

Eigen::MatrixXcd hermitian_log(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.eigenvalues()(0) <= 0.0) {
    throw DomainError("hermitian_log: matrix is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

DensityMatrix random_density(int dim, Rng& rng) {
  Eigen::MatrixXcd g = random_complex_gaussian(dim, dim, rng);
  Eigen::MatrixXcd w = g * g.adjoint();
  // ridge keeps rho + eps X positive for the perturbative checks (eps <= 1e-2)
  w += 0.12 * w.trace().real() / dim * Eigen::MatrixXcd::Identity(dim, dim);
  w /= w.trace().real();
  w = 0.5 * (w + w.adjoint());
  return DensityMatrix(std::move(w));
}

Eigen::MatrixXcd random_traceless_hermitian(int dim, Rng& rng) {
  Eigen::MatrixXcd g = random_complex_gaussian(dim, dim, rng);
  Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  h -= (h.trace() / static_cast<double>(dim)) * Eigen::MatrixXcd::Identity(dim, dim);
  const double norm = std::sqrt((h * h).trace().real());
  if (norm < 1e-12) return random_traceless_hermitian(dim, rng);
  return h / norm;
}

KrausChannel random_kraus_channel(int dim_in, int dim_out, int kraus_count, Rng& rng) {
  // QR of a tall complex Gaussian gives an isometry dim_in -> dim_out * count;
  // the stacked space must be at least dim_in wide for an isometry to exist
  kraus_count = std::max(kraus_count, (dim_in + dim_out - 1) / dim_out);
  Eigen::MatrixXcd g = random_complex_gaussian(dim_out * kraus_count, dim_in, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim_out * kraus_count, dim_in);
  std::vector<Eigen::MatrixXcd> ks(kraus_count);
  for (int i = 0; i < kraus_count; ++i) ks[i] = q.middleRows(i * dim_out, dim_out);
  return KrausChannel(std::move(ks));
}

Eigen::MatrixXcd omega_integral_quadrature(const DensityMatrix& rho, const Eigen::MatrixXcd& a,
                                           int points) {
  std::vector<double> nodes, weights;
  gauss_legendre_01(points, nodes, weights);
  const Eigen::MatrixXcd& u = rho.eigenvectors();
  const Eigen::VectorXd& p = rho.eigenvalues();
  const Eigen::MatrixXcd at = u.adjoint() * a * u;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
  for (int q = 0; q < points; ++q) {
    const double s = nodes[q];
    Eigen::VectorXd left = p.array().pow(1.0 - s);
    Eigen::VectorXd right = p.array().pow(s);
    acc += weights[q] * (left.asDiagonal() * at * right.asDiagonal());
  }
  return u * acc * u.adjoint();
}

double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  const Eigen::MatrixXcd diff = hermitian_log(rho) - hermitian_log(sigma);
  return (rho * diff).trace().real();
}

namespace {

struct SuiteState {
  PropertyReport report;
  PropertyConfig cfg;

  CheckStat& stat(const std::string& name) {
    for (auto& c : report.checks) {
      if (c.name == name) return c;
    }
    report.checks.push_back({name, 0, 0, 0.0});
    return report.checks.back();
  }

  void record(const std::string& name, bool ok, double deviation, const std::string& detail) {
    CheckStat& c = stat(name);
    ++c.trials;
    c.worst = std::max(c.worst, deviation);
    if (!ok) {
      ++c.violations;
      ++report.total_violations;
      if (report.failures.size() < 50) {
        report.failures.push_back(name + ": " + detail);
      }
    }
  }
};

}  // namespace

PropertyReport run_quantum_property_suite(const PropertyConfig& cfg) {
  SuiteState st;
  st.cfg = cfg;
  Rng rng(cfg.seed);
  std::uniform_int_distribution<int> kraus_dist(1, 3);

  for (int dim : cfg.dims) {
    for (int trial = 0; trial < cfg.trials_per_dim; ++trial) {
      const DensityMatrix rho = random_density(dim, rng);
      // mix square channels with contracting ones
      const int dim_out = (trial % 4 == 3 && dim >= 4) ? dim / 2 : dim;
      const KrausChannel channel = random_kraus_channel(dim, dim_out, kraus_dist(rng), rng);
      const Eigen::MatrixXcd x = random_traceless_hermitian(dim, rng);

      std::ostringstream ctx;
      ctx << "dim=" << dim << " dim_out=" << dim_out << " trial=" << trial;

      // relevance ratio bounds
      const double eta = relevance(rho, channel, x);
      const double excess = std::max(0.0 - eta, eta - 1.0);
      st.record("relevance_in_unit_interval", excess <= cfg.eta_slack, std::max(excess, 0.0),
                ctx.str() + " eta=" + format_full(eta));

      // metric positivity: Gram matrix of a small random feature set
      {
        const int nf = std::min(dim * dim - 1, 6);
        std::vector<Eigen::MatrixXcd> feats(nf);
        for (auto& f : feats) f = random_traceless_hermitian(dim, rng);
        Eigen::MatrixXd gram(nf, nf);
        for (int i = 0; i < nf; ++i) {
          for (int j = i; j < nf; ++j) {
            gram(i, j) = gram(j, i) = inner_product(rho, feats[i], feats[j]);
          }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const double min_eig = es.eigenvalues()(0);
        st.record("metric_positive_definite", min_eig > 0.0, -std::min(min_eig, 0.0),
                  ctx.str() + " min_gram_eig=" + format_full(min_eig));
      }

      // recovery map adjoint identity on a random probe pair
      {
        const Eigen::MatrixXcd y = random_traceless_hermitian(dim_out, rng);
        const DensityMatrix out = channel.apply(rho);
        const double lhs = inner_product(rho, recovery_apply(rho, channel, y), x);
        const double rhs = inner_product(out, y, channel.apply_matrix(x));
        const double dev = std::abs(lhs - rhs);
        st.record("recovery_adjoint_identity", dev <= cfg.adjoint_tol, dev,
                  ctx.str() + " dev=" + format_full(dev));
      }

      // integral-representation oracle for Omega
      {
        const Eigen::MatrixXcd a = random_traceless_hermitian(dim, rng);
        const Eigen::MatrixXcd lhs = omega_apply(rho, a);
        const Eigen::MatrixXcd rhs = omega_integral_quadrature(rho, a);
        const double dev = (lhs - rhs).cwiseAbs().maxCoeff();
        st.record("omega_integral_representation", dev <= cfg.omega_oracle_tol, dev,
                  ctx.str() + " dev=" + format_full(dev));
      }

      // Heisenberg duality and unitality
      {
        const Eigen::MatrixXcd b = random_traceless_hermitian(dim_out, rng);
        const double lhs = (channel.adjoint_apply(b) * rho.matrix()).trace().real();
        const double rhs = (b * channel.apply_matrix(rho.matrix())).trace().real();
        const double dev = std::abs(lhs - rhs);
        st.record("heisenberg_duality", dev <= 1e-12, dev, ctx.str());
        const double unital_dev =
            (channel.adjoint_apply(Eigen::MatrixXcd::Identity(dim_out, dim_out)) -
             Eigen::MatrixXcd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff();
        st.record("adjoint_unitality", unital_dev <= 1e-10, unital_dev, ctx.str());
      }

      // quadratic expansion of the relative entropy:
      // |S(rho + eps X || rho) - (eps^2/2) <X,X>| should vanish like eps^3.
      // The 1/2 is forced by S'' = Tr(X Omega^{-1} X) at eps = 0 together with
      // the metric normalization fixed by the classical chi-square form.
      {
        const double gxx = inner_product(rho, x, x);
        const std::vector<double> eps_list{1e-2, 3.1622776601683794e-3, 1e-3,
                                           3.1622776601683794e-4, 1e-4};
        std::vector<double> ls, lr;
        const double floor = 1e-13 * std::max(1.0, gxx);
        for (double eps : eps_list) {
          const Eigen::MatrixXcd pert = rho.matrix() + eps * x;
          const double s_val = relative_entropy(pert, rho.matrix());
          const double resid = std::abs(s_val - 0.5 * eps * eps * gxx);
          if (resid > floor) {
            ls.push_back(std::log(eps));
            lr.push_back(std::log(resid));
          }
        }
        if (ls.size() >= 2) {
          // an accidental c3/c4 cancellation can flatten the full-window fit
          // even though the residual is cubic; a genuinely sub-cubic residual
          // stays flat on every sub-window, so take the best contiguous fit
          double slope = -std::numeric_limits<double>::infinity();
          const int total = static_cast<int>(ls.size());
          for (int lo = 0; lo < total; ++lo) {
            for (int hi = lo + 1; hi < total; ++hi) {
              if (hi - lo + 1 < std::min(3, total)) continue;
              Eigen::Map<Eigen::VectorXd> vx(ls.data() + lo, hi - lo + 1);
              Eigen::Map<Eigen::VectorXd> vy(lr.data() + lo, hi - lo + 1);
              slope = std::max(slope, fit_line(vx, vy).slope);
            }
          }
          st.record("relative_entropy_quadratic_slope", slope >= cfg.min_entropy_slope,
                    std::max(0.0, cfg.min_entropy_slope - slope),
                    ctx.str() + " slope=" + format_full(slope));
        } else {
          // residuals at the arithmetic floor: better than cubic already
          st.record("relative_entropy_quadratic_slope", true, 0.0, ctx.str());
        }
      }
    }
  }
  return st.report;
}

void write_report_csv(const PropertyReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_report_csv: cannot open " + path);
  out << "check,trials,violations,worst_deviation\n";
  for (const auto& c : report.checks) {
    out << c.name << "," << c.trials << "," << c.violations << "," << format_full(c.worst)
        << "\n";
  }
}

}  // namespace rlab::props
