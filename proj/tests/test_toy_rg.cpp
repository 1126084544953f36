#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rlab/channels.hpp"
#include "rlab/eigenrelevance.hpp"
#include "rlab/errors.hpp"
#include "rlab/toy_rg.hpp"
#include "rlab/util.hpp"

using namespace rlab;
using namespace rlab::toy;

TEST_CASE("hermite references: constant, root, generating function") {
  const Eigen::VectorXd grid = make_grid(-3.0, 3.0, 7);
  const Eigen::VectorXd h0 = hermite_reference(0, 1.0, grid);
  for (int i = 0; i < 7; ++i) CHECK(h0(i) == doctest::Approx(1.0));

  Eigen::VectorXd one(2);
  one << 1.0, -1.0;
  Eigen::VectorXd g2(2);
  g2 << 1.0, -1.0;
  const Eigen::VectorXd h2 = hermite_reference(2, 1.0, g2);
  CHECK(std::abs(h2(0)) < 1e-15);  // He_2(1) = 0

  // sum_n A_n(x) t^n / sqrt(n!) = exp(x t / tau - t^2 / 2)
  const double t = 0.3, tau = 1.0;
  Eigen::VectorXd xs(3);
  xs << -1.7, 0.4, 2.2;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
  double tn_over_sqrt = 1.0;  // t^n / sqrt(n!)
  for (int n = 0; n < 20; ++n) {
    if (n > 0) tn_over_sqrt *= t / std::sqrt(static_cast<double>(n));
    acc += tn_over_sqrt * hermite_reference(n, tau, xs);
  }
  for (int i = 0; i < 3; ++i) {
    const double expected = std::exp(xs(i) * t / tau - 0.5 * t * t);
    CHECK(std::abs(acc(i) - expected) < 1e-10);
  }
}

TEST_CASE("closed-form relevance values") {
  CHECK(toy_exact_relevance(1, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(toy_exact_relevance(5, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(toy_exact_relevance(3, 1.0, 3.0) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("relevance decreases monotonically with noise") {
  for (int n = 1; n <= 6; ++n) {
    double prev = 1.0;
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double eta = toy_exact_relevance(n, 1.0, sigma);
      CHECK(eta <= prev + 1e-15);
      prev = eta;
    }
  }
}

TEST_CASE("gaussian moments by quadrature") {
  const MomentVector m = moments(ToyHamiltonian{1.0, 0.0, 0.0}, 6);
  CHECK(m.order(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.order(4) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.order(6) == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("small quartic coupling shifts the second moment linearly") {
  // linear response d<x^2>/dlambda = -12 at the gaussian point; the quadratic
  // correction is large (~265 lambda^2), so the 1 - 12 lambda form only holds
  // for couplings below ~2e-3
  const double m2_small = moments(ToyHamiltonian{1.0, 1e-3, 0.0}, 2).order(2);
  CHECK(std::abs(m2_small - (1.0 - 12.0 * 1e-3)) < 0.002);
  const double m2_plus = moments(ToyHamiltonian{1.0, 1e-4, 0.0}, 2).order(2);
  const double slope = (m2_plus - 1.0) / 1e-4;
  CHECK(std::abs(slope - (-12.0)) / 12.0 < 0.01);
}

TEST_CASE("non-normalizable densities raise divergence errors") {
  CHECK_THROWS_AS(moments(ToyHamiltonian{1.0, -0.01, 0.0}, 4), DivergenceError);
  CHECK_THROWS_AS(moments(ToyHamiltonian{1.0, 0.1, -1e-4}, 4), DivergenceError);
}

TEST_CASE("negative quartic with a sextic regulator stays integrable") {
  for (double eps : {4e-3, 1e-3, 1e-4}) {
    const MomentVector m = moments(ToyHamiltonian{1.0, -0.05, eps}, 6);
    CHECK(std::isfinite(m.order(6)));
    // Cauchy-Schwarz, with slack for the two-well limit where m4 -> m2^2
    CHECK(m.order(4) >= m.order(2) * m.order(2) * (1.0 - 1e-9));
  }
}

TEST_CASE("moments vary continuously along the matched flow into lambda < 0") {
  const FlowRecord rec = flow_trace(0.01, 1.0, {0.0, 5e-4, 1e-3, 2e-3});
  CHECK(rec.lambda(3) < 0.0);  // the regulated rows cross into negative quartic
  const double m6_at_0 =
      moments(ToyHamiltonian{rec.tau(0), rec.lambda(0), rec.eps6(0)}, 6).order(6);
  double prev_gap = 0.0;
  for (int i = 3; i >= 1; --i) {
    const double m6 = moments(ToyHamiltonian{rec.tau(i), rec.lambda(i), rec.eps6(i)}, 6).order(6);
    const double gap = std::abs(m6 - m6_at_0);
    CHECK(std::isfinite(m6));
    if (i < 3) CHECK(gap < prev_gap);  // approaches the eps = 0 row
    prev_gap = gap;
  }
}

TEST_CASE("match_couplings at the gaussian fixed point") {
  MomentVector target;
  target.orders = {2, 4};
  target.values.resize(2);
  target.values << 1.0, 3.0;
  const auto [tau, lambda] = match_couplings(0.0, target);
  CHECK(std::abs(tau - 1.0) < 1e-10);
  CHECK(std::abs(lambda) < 1e-10);
}

TEST_CASE("match_couplings round trip recovers known couplings") {
  const ToyHamiltonian truth{1.13, 0.021, 7e-4};
  const MomentVector target = moments(truth, 4);
  const auto [tau, lambda] = match_couplings(truth.eps6, target);
  CHECK(std::abs(tau - truth.tau) < 1e-8);
  CHECK(std::abs(lambda - truth.lambda) < 1e-8);
}

TEST_CASE("matched moments reproduce the target by construction") {
  MomentVector target;
  target.orders = {2, 4};
  target.values.resize(2);
  target.values << 0.93, 2.61;
  const auto [tau, lambda] = match_couplings(1e-3, target);
  const MomentVector got = moments(ToyHamiltonian{tau, lambda, 1e-3}, 4);
  CHECK(std::abs(got.order(2) - 0.93) < 1e-10);
  CHECK(std::abs(got.order(4) - 2.61) < 1e-10);
}

TEST_CASE("unreachable targets end in a no-solution error") {
  MomentVector target;
  target.orders = {2, 4};
  target.values.resize(2);
  target.values << 1.0, 100.0;  // kurtosis far above anything reachable at eps = 0
  CHECK_THROWS_AS(match_couplings(0.0, target), NoSolutionError);
  CHECK_THROWS_AS(match_couplings(-1e-3, target), DomainError);
}

TEST_CASE("first-order response coefficients around the gaussian point") {
  const RgCoefficients rg = rg_coefficients();
  CHECK(std::abs(rg.dlambda_deps - (-15.0)) / 15.0 < 0.02);
  CHECK(std::abs(rg.dtau_dlambda_rel - 6.0) / 6.0 < 0.02);
  CHECK(std::abs(rg.dtau_deps_rel - (-45.0)) / 45.0 < 0.02);
  CHECK(std::isfinite(rg.cross_term));
}

TEST_CASE("flow trace: single point, slope, shared moments") {
  SUBCASE("single-point grid is the physical anchor") {
    const FlowRecord rec = flow_trace(0.01, 1.0, {0.0});
    CHECK(rec.eps6.size() == 1);
    CHECK(rec.lambda(0) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(std::abs(std::sqrt(rec.m2(0)) - 1.0) < 1e-9);  // tau_phys is the second moment
    CHECK(rec.tau(0) == doctest::Approx(rec.tau_bare0).epsilon(1e-12));
  }
  SUBCASE("bare quartic coupling runs downhill at rate about -15") {
    const FlowRecord rec = flow_trace(0.01, 1.0, {0.0, 1e-3, 2e-3});
    CHECK(rec.lambda(1) < rec.lambda(0));
    CHECK(rec.lambda(2) < rec.lambda(1));
    Eigen::VectorXd eps = rec.eps6;
    const double slope = fit_line(eps, rec.lambda).slope;
    CHECK(std::abs(slope - (-15.0)) / 15.0 < 0.15);
    // every row carries the invariant first four moments
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(rec.m2(i) - rec.invariants.order(2)) < 1e-9);
      CHECK(std::abs(rec.m4(i) - rec.invariants.order(4)) < 1e-9);
    }
  }
  SUBCASE("rows stay first-order equivalent at threshold four") {
    const FlowRecord rec = flow_trace(0.01, 1.0, {0.0, 1e-3, 2e-3});
    const Eigen::VectorXd grid = make_grid(-7.0, 7.0, 700);
    const ClassicalState ref = discretize(ToyHamiltonian{rec.tau_bare0, 0.0, 0.0}, grid);
    const StochasticChannel conv = build_gaussian_convolution(grid, 1.0);
    RelevanceSpectrum spec = solve_spectrum(relevance_operator(ref, conv), 8);
    set_threshold_by_index(spec, 4);
    const ClassicalState row0 =
        discretize(ToyHamiltonian{rec.tau(0), rec.lambda(0), rec.eps6(0)}, grid);
    for (int i = 1; i < 3; ++i) {
      const ClassicalState rown =
          discretize(ToyHamiltonian{rec.tau(i), rec.lambda(i), rec.eps6(i)}, grid);
      const auto w = equivalent_first_order(spec, row0.probs(), rown.probs(), 1e-4);
      CHECK(w.equivalent);
    }
  }
  SUBCASE("grids must increase and stay nonnegative") {
    CHECK_THROWS_AS(flow_trace(0.01, 1.0, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(flow_trace(0.01, 1.0, {-1e-3, 0.0}), DomainError);
  }
}

TEST_CASE("two matched states split exactly at the sixth moment") {
  // same first four moments, different sixth: equivalent at threshold 4,
  // distinguishable at threshold 6
  const FlowRecord rec = flow_trace(0.01, 1.0, {0.0, 2e-3});
  const MomentVector m0 = moments(ToyHamiltonian{rec.tau(0), rec.lambda(0), rec.eps6(0)}, 6);
  const MomentVector m1 = moments(ToyHamiltonian{rec.tau(1), rec.lambda(1), rec.eps6(1)}, 6);
  CHECK(std::abs(m0.order(4) - m1.order(4)) < 1e-9);
  CHECK(std::abs(m0.order(6) - m1.order(6)) > 1e-3);

  const Eigen::VectorXd grid = make_grid(-7.0, 7.0, 700);
  const ClassicalState s0 = discretize(ToyHamiltonian{rec.tau(0), rec.lambda(0), 0.0}, grid);
  const ClassicalState s1 =
      discretize(ToyHamiltonian{rec.tau(1), rec.lambda(1), rec.eps6(1)}, grid);
  const ClassicalState ref = discretize(ToyHamiltonian{rec.tau_bare0, 0.0, 0.0}, grid);
  RelevanceSpectrum spec =
      solve_spectrum(relevance_operator(ref, build_gaussian_convolution(grid, 1.0)), 8);
  set_threshold_by_index(spec, 4);
  CHECK(equivalent_first_order(spec, s0.probs(), s1.probs(), 1e-4).equivalent);
  set_threshold_by_index(spec, 6);
  const auto w6 = equivalent_first_order(spec, s0.probs(), s1.probs(), 1e-4);
  CHECK_FALSE(w6.equivalent);
  CHECK(w6.worst_index == 6);
}

TEST_CASE("hermite observables span the low-degree polynomials on the grid") {
  const Eigen::VectorXd grid = make_grid(-7.0, 7.0, 120);
  const int n = 5;
  Eigen::MatrixXd h(grid.size(), n + 1);
  for (int j = 0; j <= n; ++j) h.col(j) = hermite_reference(j, 1.0, grid);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  CHECK(qr.rank() == n + 1);
  for (int k = 0; k <= n; ++k) {
    Eigen::VectorXd mono(grid.size());
    for (int i = 0; i < grid.size(); ++i) mono(i) = std::pow(grid(i), k);
    const Eigen::VectorXd resid = h * qr.solve(mono) - mono;
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("flow csv carries the mandatory header") {
  const FlowRecord rec = flow_trace(0.0, 1.0, {0.0, 1e-3});
  const std::string path = "toy_flow_test.csv";
  write_flow_csv(rec, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "eps6,tau,lambda,m2,m4");
  std::remove(path.c_str());
}
