// Acceptance suite: every criterion prints one PASS/FAIL line with the
// measured values; the process exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rlab/channels.hpp"
#include "rlab/eigenrelevance.hpp"
#include "rlab/fock_oracle.hpp"
#include "rlab/gaussian_sector.hpp"
#include "rlab/kubo_mori.hpp"
#include "rlab/props.hpp"
#include "rlab/toy_rg.hpp"
#include "rlab/util.hpp"

using namespace rlab;

namespace {

struct Criterion {
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// 1. grid eigensolver vs eta_n = 2^{-n} on the pinned grid
void criterion_toy_spectrum(Criterion& c) {
  const Eigen::VectorXd grid = toy::make_grid(-12.0, 12.0, 600);
  const ClassicalState rho = toy::discretize(toy::ToyHamiltonian{1.0, 0.0, 0.0}, grid);
  const StochasticChannel conv = build_gaussian_convolution(grid, 1.0);
  const RelevanceSpectrum s = solve_spectrum(relevance_operator(rho, conv), 7);
  double worst_eta = 0.0, worst_overlap = 1.0;
  for (int n = 0; n <= 6; ++n) {
    const double exact = std::pow(0.5, n);
    worst_eta = std::max(worst_eta, std::abs(s.etas(n) - exact) / exact);
    const Eigen::VectorXd ref = omega_apply(rho, toy::hermite_reference(n, 1.0, grid));
    const double overlap = std::abs(inner_product(rho, s.features.col(n), ref)) /
                           std::sqrt(inner_product(rho, ref, ref));
    worst_overlap = std::min(worst_overlap, overlap);
  }
  c.require(worst_eta < 0.01, "eta error " + fmt(worst_eta) + " exceeds 1%");
  c.require(worst_overlap >= 0.999, "overlap " + fmt(worst_overlap) + " below 0.999");
  c.note("worst eta rel err " + fmt(worst_eta) + ", worst overlap " + fmt(worst_overlap));
}

// 2. first-order response coefficients -15, +6, -45 within 2%
void criterion_rg_coefficients(Criterion& c) {
  const toy::RgCoefficients rg = toy::rg_coefficients();
  const double e1 = std::abs(rg.dlambda_deps + 15.0) / 15.0;
  const double e2 = std::abs(rg.dtau_dlambda_rel - 6.0) / 6.0;
  const double e3 = std::abs(rg.dtau_deps_rel + 45.0) / 45.0;
  c.require(e1 < 0.02, "dlambda/deps = " + fmt(rg.dlambda_deps));
  c.require(e2 < 0.02, "dtau/(tau dlambda) = " + fmt(rg.dtau_dlambda_rel));
  c.require(e3 < 0.02, "dtau/(tau deps) = " + fmt(rg.dtau_deps_rel));
  c.note("dl/de " + fmt(rg.dlambda_deps) + ", dt/dl " + fmt(rg.dtau_dlambda_rel) + ", dt/de " +
         fmt(rg.dtau_deps_rel) + ", cross " + fmt(rg.cross_term));
}

// 3. maximally mixed pair under partial trace: {1 x 4, 0 x 12}
void criterion_partial_trace_spectrum(Criterion& c) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
  const KrausChannel tr = partial_trace_channel({2, 2}, {0});
  const RelevanceSpectrum s = solve_spectrum(relevance_operator(rho, tr), 16);
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    worst = std::max(worst, i < 4 ? std::abs(s.etas(i) - 1.0) : std::abs(s.etas(i)));
  }
  c.require(worst < 1e-9, "spectrum deviation " + fmt(worst));
  c.note("worst deviation " + fmt(worst));
}

// 4. factorized states: dual relevance map becomes the {0,1} projector with
//    unit sector {A (x) 1}
void criterion_factorized_projector(Criterion& c) {
  props::Rng rng(20240);
  double worst_eig = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> dims = trial % 2 == 0 ? std::vector<int>{2, 2} : std::vector<int>{2, 3};
    const DensityMatrix rho_a = props::random_density(dims[0], rng);
    const DensityMatrix rho_b = props::random_density(dims[1], rng);
    const DensityMatrix rho(kron(rho_a.matrix(), rho_b.matrix()));
    const KrausChannel tr = partial_trace_channel(dims, {0});
    const RelevancePencil p = relevance_operator(rho, tr);
    const RelevanceSpectrum s = solve_spectrum(p, p.op_dim);
    const int unit = dims[0] * dims[0];
    for (int i = 0; i < s.etas.size(); ++i) {
      worst_eig = std::max(worst_eig, i < unit ? std::abs(s.etas(i) - 1.0) : s.etas(i));
    }
    const Eigen::MatrixXd top = s.features.leftCols(unit);
    for (const auto& basis_a : hermitian_basis(dims[0])) {
      const Eigen::MatrixXcd lifted =
          omega_apply(rho, kron(basis_a, Eigen::MatrixXcd::Identity(dims[1], dims[1])));
      Eigen::VectorXd y = to_basis_coords(lifted);
      y /= std::sqrt(y.dot(p.k * y));
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(y.size());
      for (int col = 0; col < top.cols(); ++col) {
        proj += top.col(col).dot(p.k * y) * top.col(col);
      }
      const Eigen::VectorXd r = y - proj;
      worst_res = std::max(worst_res, std::sqrt(std::abs(r.dot(p.k * r))));
    }
  }
  c.require(worst_eig < 1e-8, "eigenvalue deviation " + fmt(worst_eig));
  c.require(worst_res < 1e-8, "unit eigenspace residual " + fmt(worst_res));
  c.note("worst eig dev " + fmt(worst_eig) + ", worst subspace residual " + fmt(worst_res));
}

// 5. scaling exponents of the two quadratic field observables
void criterion_scaling_exponents(Criterion& c) {
  for (int d : {1, 2}) {
    const gauss::FieldLattice lat = d == 1 ? gauss::FieldLattice(1, 0.05, 65536)
                                           : gauss::FieldLattice(2, 0.05, 4096);
    const gauss::ClassicalFieldTheory th{1.0, 1.0};
    const double h = 10.0;
    std::vector<double> sigmas;
    for (int i = 0; i < 7; ++i) sigmas.push_back(5.0 * std::pow(16.0 / 5.0, i / 6.0));

    const double s2 =
        gauss::scaling_exponent(gauss::FieldObservable::phi2, lat, th, h, sigmas).slope;
    c.require(std::abs(s2 - (-d)) / d < 0.05,
              "d=" + std::to_string(d) + " phi2 slope " + fmt(s2));
    const double sl =
        gauss::scaling_exponent(gauss::FieldObservable::phi_laplacian_phi, lat, th, h, sigmas)
            .slope;
    c.require(std::abs(sl - (-(d + 2.0))) / (d + 2.0) < 0.05,
              "d=" + std::to_string(d) + " phi-laplacian-phi slope " + fmt(sl) +
                  " vs target " + fmt(-(d + 2.0)));
    c.note("d=" + std::to_string(d) + ": phi2 " + fmt(s2) + ", phi-lap-phi " + fmt(sl));
  }
  {
    const gauss::FieldLattice lat(1, 0.05, 65536);
    const gauss::ClassicalFieldTheory th{1.0, 1.0};
    std::vector<double> hs;
    for (int i = 0; i < 7; ++i) hs.push_back(8.0 * std::pow(4.0, i / 6.0));
    const double sh =
        gauss::scaling_exponent_in_h(gauss::FieldObservable::phi2, lat, th, 8.0, hs).slope;
    c.require(std::abs(sh - (-4.0)) / 4.0 < 0.05, "h slope " + fmt(sh));
    c.note("h slope " + fmt(sh));
  }
}

// 6. momentum-shell mass shift: closed form, additivity, free limit
void criterion_mass_shell(Criterion& c) {
  const double got = gauss::mass_shell_shift(1.0, 1.0, 10.0, 1.0, 1);
  const double closed = 1.0 + 0.5 * (std::asinh(10.0) - std::asinh(1.0));
  c.require(std::abs(got - closed) < 1e-10, "closed-form gap " + fmt(std::abs(got - closed)));

  double worst_add = 0.0;
  for (int d : {1, 2, 3}) {
    const double whole = gauss::mass_shell_shift(1.0, 0.8, 9.0, 1.0, d) - 1.0;
    const double split = (gauss::mass_shell_shift(1.0, 0.8, 4.0, 1.0, d) - 1.0) +
                         (gauss::mass_shell_shift(1.0, 0.8, 9.0, 4.0, d) - 1.0);
    worst_add = std::max(worst_add, std::abs(whole - split));
  }
  c.require(worst_add < 1e-12, "additivity gap " + fmt(worst_add));
  c.require(gauss::mass_shell_shift(1.0, 0.0, 10.0, 1.0, 1) == 1.0, "free limit not exact");
  c.note("closed-form gap " + fmt(std::abs(got - closed)) + ", additivity " + fmt(worst_add));
}

// 7. randomized property suite across dimensions
void criterion_property_suite(Criterion& c) {
  props::PropertyConfig cfg;
  cfg.dims = {2, 3, 4, 6};
  cfg.trials_per_dim = 100;
  cfg.seed = 90125;
  const auto report = props::run_quantum_property_suite(cfg);
  c.require(report.total_violations == 0,
            std::to_string(report.total_violations) + " violations; first: " +
                (report.failures.empty() ? "-" : report.failures.front()));
  for (const auto& chk : report.checks) {
    if (chk.name == "relative_entropy_quadratic_slope" && chk.violations == 0) {
      c.note("entropy slope check clean over " + std::to_string(chk.trials) + " trials");
    }
  }
}

// 8. Fock oracle against the quantum-particle formulas
void criterion_fock_oracle(Criterion& c) {
  // linear sector at uv = 3, sigma_x = 10 with the pinned truncation
  {
    gauss::FockOracleParams params;  // cutoff 40
    const auto res = gauss::fock_gaussian_pencil(3.0, 10.0, params);
    const gauss::QuantumGaussianState st{std::sqrt(3.0), std::sqrt(3.0), 0.0, 0.0};
    const auto formulas = gauss::quantum_particle_relevance(st, 10.0, 10.0);
    const double rel = std::abs(res.eta_linear() - formulas.eta_x) / formulas.eta_x;
    c.require(rel < 0.05, "eta(x) asymptotic gap " + fmt(rel));
    c.note("eta(x): oracle " + fmt(res.eta_linear()) + " vs asymptotic " + fmt(formulas.eta_x) +
           " (gap " + fmt(rel) + ")");
  }
  // large-uv quadratic pair at uv = 50. The pinned N = 40 truncation fails its
  // own N vs N+20 agreement check here (the thermal state occupies ~25 quanta),
  // so the truncation is escalated until the check passes, per the oracle's
  // convergence protocol. The raw N = 40 values are reported alongside.
  {
    const double uv = 50.0;
    const double sigma = std::sqrt(2000.0);
    const double paper = uv * uv / (sigma * sigma * sigma * sigma);

    gauss::FockOracleParams p40;
    gauss::FockOracleParams p60;
    p60.cutoff = 60;
    const auto r40 = gauss::fock_gaussian_pencil(uv, sigma, p40);
    const auto r60 = gauss::fock_gaussian_pencil(uv, sigma, p60);
    const double drift =
        std::abs(r40.eta_quadratic_thermal() - r60.eta_quadratic_thermal()) /
        r60.eta_quadratic_thermal();
    c.note("N=40 raw thermal eta " + fmt(r40.eta_quadratic_thermal()) + " (N=60 drift " +
           fmt(drift) + ")");

    gauss::FockOracleParams converged;
    converged.cutoff = 240;
    gauss::FockOracleParams check;
    check.cutoff = 280;
    const auto rc = gauss::fock_gaussian_pencil(uv, sigma, converged);
    const auto rk = gauss::fock_gaussian_pencil(uv, sigma, check);
    const double conv_drift =
        std::abs(rc.eta_quadratic_thermal() - rk.eta_quadratic_thermal()) /
        rk.eta_quadratic_thermal();
    c.require(conv_drift < 0.05, "oracle not converged at N=240 (drift " + fmt(conv_drift) + ")");

    const double gap_thermal = std::abs(rc.eta_quadratic_thermal() - paper) / paper;
    const double gap_squeeze = std::abs(rc.eta_quadratic_squeeze() - paper) / paper;
    c.require(gap_thermal < 0.10, "thermal quadratic gap " + fmt(gap_thermal));
    c.require(gap_squeeze < 0.10, "squeeze quadratic gap " + fmt(gap_squeeze));
    c.note("uv=50 quadratics: " + fmt(rc.eta_quadratic_thermal()) + ", " +
           fmt(rc.eta_quadratic_squeeze()) + " vs u^4/sigma_p^4 = " + fmt(paper));
  }
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"1 toy spectrum eta_n = 2^-n (1%, overlaps >= 0.999, < 30 s)", criterion_toy_spectrum},
      {"2 running-coupling coefficients -15 / +6 / -45 (2%, < 10 s)", criterion_rg_coefficients},
      {"3 partial-trace spectrum {1 x 4, 0 x 12} (1e-9)", criterion_partial_trace_spectrum},
      {"4 factorized-state projector {0,1} with A (x) 1 unit sector (1e-8)",
       criterion_factorized_projector},
      {"5 scaling exponents -d / -(d+2) / -4 in h (5%, < 60 s)", criterion_scaling_exponents},
      {"6 mass shell: closed form 1e-10, additivity 1e-12, free limit exact",
       criterion_mass_shell},
      {"7 property suite dims {2,3,4,6} x 100 (< 120 s)", criterion_property_suite},
      {"8 Fock oracle: eta(x) 5% at uv=3, quadratics 10% at uv=50", criterion_fock_oracle},
  };

  int failures = 0;
  for (auto& [name, fn] : criteria) {
    Criterion c;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
      c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      // re-check the runtime-bound criteria with the final timing
      if (name[0] == '1') c.require(c.seconds < 30.0, "runtime above 30 s");
      if (name[0] == '2') c.require(c.seconds < 10.0, "runtime above 10 s");
      if (name[0] == '5') c.require(c.seconds < 60.0, "runtime above 60 s");
      if (name[0] == '7') c.require(c.seconds < 120.0, "runtime above 120 s");
    } catch (const std::exception& e) {
      c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s (%.1f s)%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
