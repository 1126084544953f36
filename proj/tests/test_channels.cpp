#include <doctest.h>

#include <random>

#include "rlab/channels.hpp"
#include "rlab/errors.hpp"
#include "rlab/kubo_mori.hpp"
#include "rlab/props.hpp"
#include "rlab/toy_rg.hpp"
#include "rlab/util.hpp"
#include "test_helpers.hpp"

using namespace rlab;
using test_helpers::max_abs;
using test_helpers::pauli;

TEST_CASE("identity channel fixes every state") {
  props::Rng rng(3);
  const DensityMatrix rho = props::random_density(3, rng);
  const KrausChannel id = KrausChannel::identity(3);
  CHECK(max_abs(id.apply(rho).matrix() - rho.matrix()) < 1e-14);
}

TEST_CASE("partial trace of a product state is the kept factor") {
  props::Rng rng(41);
  const DensityMatrix a = props::random_density(2, rng);
  const DensityMatrix b = props::random_density(3, rng);
  const Eigen::MatrixXcd full = kron(a.matrix(), b.matrix());
  const KrausChannel tr = partial_trace_channel({2, 3}, {0});
  CHECK(max_abs(tr.apply_matrix(full) - a.matrix()) < 1e-14);

  // independent marginalization oracle: sum over the discarded index directly
  Eigen::MatrixXcd marginal = Eigen::MatrixXcd::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 3; ++k) marginal(i, j) += full(i * 3 + k, j * 3 + k);
    }
  }
  CHECK(max_abs(tr.apply_matrix(full) - marginal) < 1e-14);
}

TEST_CASE("partial trace of the Bell state is maximally mixed") {
  Eigen::VectorXcd bell(4);
  bell << 1, 0, 0, 1;
  bell /= std::sqrt(2.0);
  const Eigen::MatrixXcd rho = bell * bell.adjoint();
  const KrausChannel tr = partial_trace_channel({2, 2}, {0});
  CHECK(max_abs(tr.apply_matrix(rho) - 0.5 * Eigen::MatrixXcd::Identity(2, 2)) < 1e-14);
}

TEST_CASE("keeping every subsystem gives the identity channel") {
  props::Rng rng(43);
  const DensityMatrix rho = props::random_density(4, rng);
  const KrausChannel keep_all = partial_trace_channel({2, 2}, {0, 1});
  CHECK(max_abs(keep_all.apply_matrix(rho.matrix()) - rho.matrix()) < 1e-14);
}

TEST_CASE("partial trace rejects invalid keep sets") {
  CHECK_THROWS_AS(partial_trace_channel({2, 2}, {}), ValidationError);
  CHECK_THROWS_AS(partial_trace_channel({2, 2}, {2}), ValidationError);
}

TEST_CASE("gaussian convolution maps a point mass to a discrete gaussian") {
  const Eigen::VectorXd grid = toy::make_grid(-8.0, 8.0, 400);
  const int center = 200;  // cell just right of zero
  Eigen::VectorXd p = Eigen::VectorXd::Constant(400, 1e-300);
  p(center) = 1.0 - 399e-300;
  const ClassicalState delta(grid, p);
  const StochasticChannel conv = build_gaussian_convolution(grid, 1.0);
  const ClassicalState out = conv.apply(delta);
  Eigen::VectorXd expected(400);
  for (int i = 0; i < 400; ++i) {
    const double d = grid(i) - grid(center);
    expected(i) = std::exp(-0.5 * d * d);
  }
  expected /= expected.sum();
  CHECK(max_abs(out.probs() - expected) < 1e-6);
}

TEST_CASE("convolution columns sum to one exactly after renormalization") {
  const Eigen::VectorXd grid = toy::make_grid(-6.0, 6.0, 200);
  const StochasticChannel conv = build_gaussian_convolution(grid, 0.5);
  for (int j = 0; j < 200; j += 17) {
    CHECK(std::abs(conv.matrix().col(j).sum() - 1.0) < 1e-14);
  }
}

TEST_CASE("vanishing noise gives a near-identity kernel") {
  const Eigen::VectorXd grid = toy::make_grid(-2.0, 2.0, 100);
  const double dx = grid(1) - grid(0);
  const StochasticChannel conv =
      build_gaussian_convolution(grid, dx / 100.0, CoarseGridPolicy::allow);
  double off_diag = 0.0;
  for (int j = 0; j < 100; ++j) {
    off_diag = std::max(off_diag, conv.matrix().col(j).sum() - conv.matrix()(j, j));
  }
  CHECK(off_diag < 1e-10);
}

TEST_CASE("coarse grids are rejected by default") {
  const Eigen::VectorXd grid = toy::make_grid(-2.0, 2.0, 10);
  CHECK_THROWS_AS(build_gaussian_convolution(grid, 0.05), ConfigError);
  CHECK_NOTHROW(build_gaussian_convolution(grid, 0.05, CoarseGridPolicy::allow));
}

TEST_CASE("composition of convolutions follows the gaussian semigroup") {
  const Eigen::VectorXd grid = toy::make_grid(-12.0, 12.0, 480);
  const double s1 = 0.6, s2 = 0.8;
  const StochasticChannel c1 = build_gaussian_convolution(grid, s1);
  const StochasticChannel c2 = build_gaussian_convolution(grid, s2);
  const StochasticChannel c12 = build_gaussian_convolution(grid, std::hypot(s1, s2));
  const Eigen::MatrixXd diff = c2.matrix() * c1.matrix() - c12.matrix();
  // interior columns: sources at least 6 sigma from either edge
  const double margin = 6.0 * std::hypot(s1, s2);
  double worst = 0.0;
  int interior = 0;
  for (int j = 0; j < grid.size(); ++j) {
    if (grid(j) - grid(0) < margin || grid(grid.size() - 1) - grid(j) < margin) continue;
    ++interior;
    worst = std::max(worst, diff.col(j).lpNorm<2>());
  }
  REQUIRE(interior > 100);
  CHECK(worst < 1e-6);
}

TEST_CASE("adjoint is unital and satisfies Heisenberg duality") {
  props::Rng rng(47);
  for (int t = 0; t < 5; ++t) {
    const KrausChannel ch = props::random_kraus_channel(3, 2, 2, rng);
    CHECK(max_abs(ch.adjoint_apply(Eigen::MatrixXcd::Identity(2, 2)) -
                  Eigen::MatrixXcd::Identity(3, 3)) < 1e-12);
    const DensityMatrix rho = props::random_density(3, rng);
    const Eigen::MatrixXcd b = props::random_traceless_hermitian(2, rng);
    const double lhs = (ch.adjoint_apply(b) * rho.matrix()).trace().real();
    const double rhs = (b * ch.apply_matrix(rho.matrix())).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("partial-trace adjoint embeds observables with an identity factor") {
  props::Rng rng(53);
  const KrausChannel tr = partial_trace_channel({2, 3}, {0});
  const Eigen::MatrixXcd b = props::random_traceless_hermitian(2, rng);
  CHECK(max_abs(tr.adjoint_apply(b) - kron(b, Eigen::MatrixXcd::Identity(3, 3))) < 1e-14);
}

TEST_CASE("recovery map fixes the reference state") {
  props::Rng rng(59);
  const DensityMatrix rho = props::random_density(3, rng);
  const KrausChannel ch = props::random_kraus_channel(3, 3, 2, rng);
  const DensityMatrix out = ch.apply(rho);
  CHECK(max_abs(recovery_apply(rho, ch, out.matrix()) - rho.matrix()) < 1e-10);
}

TEST_CASE("recovery through the identity channel is the identity") {
  props::Rng rng(61);
  const DensityMatrix rho = props::random_density(3, rng);
  const KrausChannel id = KrausChannel::identity(3);
  const Eigen::MatrixXcd y = props::random_traceless_hermitian(3, rng);
  CHECK(max_abs(recovery_apply(rho, id, y) - y) < 1e-11);
}

TEST_CASE("recovery satisfies the metric adjoint identity") {
  props::Rng rng(67);
  const DensityMatrix rho = props::random_density(2, rng);
  const KrausChannel ch = props::random_kraus_channel(2, 2, 2, rng);
  const RecoveryMap rec(rho, ch);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXcd x = props::random_traceless_hermitian(2, rng);
    const Eigen::MatrixXcd y = props::random_traceless_hermitian(2, rng);
    const double lhs = inner_product(rho, rec.apply(y), x);
    const double rhs = inner_product(rec.output_state(), y, ch.apply_matrix(x));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("factorized states turn the dual relevance map into a projector") {
  props::Rng rng(71);
  for (const auto& dims : {std::vector<int>{2, 2}, std::vector<int>{2, 3}}) {
    const DensityMatrix rho_a = props::random_density(dims[0], rng);
    const DensityMatrix rho_b = props::random_density(dims[1], rng);
    const DensityMatrix rho(kron(rho_a.matrix(), rho_b.matrix()));
    const KrausChannel tr = partial_trace_channel(dims, {0});
    const DensityMatrix out = tr.apply(rho);
    const Eigen::MatrixXcd a = props::random_traceless_hermitian(dims[0], rng);
    const Eigen::MatrixXcd b = props::random_traceless_hermitian(dims[1], rng);
    Eigen::MatrixXcd ab = kron(a, b) + 0.3 * kron(a, Eigen::MatrixXcd::Identity(dims[1], dims[1]));
    // dual map E^+ R^+ = E^+ o Omega^{-1}_{E rho} o E o Omega_rho on observables
    const Eigen::MatrixXcd projected =
        tr.adjoint_apply(omega_inverse(out, tr.apply_matrix(omega_apply(rho, ab))));
    const double tr_b = rho_b.expectation(b);
    const Eigen::MatrixXcd expected =
        kron((tr_b + 0.3) * a, Eigen::MatrixXcd::Identity(dims[1], dims[1]));
    CHECK(max_abs(projected - expected) < 1e-9);
  }
}

TEST_CASE("gaussian channel specs validate the CP condition") {
  GaussianChannelSpec ok = particle_noise_spec(1.0, 2.0);
  CHECK_NOTHROW(ok.validate());

  GaussianChannelSpec bad = ok;
  bad.y_matrix(0, 0) = -0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  // pure attenuation without compensating noise is not completely positive
  GaussianChannelSpec atten;
  atten.x_matrix = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  atten.y_matrix = Eigen::MatrixXd::Zero(2, 2);
  atten.quantum = true;
  CHECK_THROWS_AS(atten.validate(), ValidationError);
  // the same map is a fine classical kernel
  atten.quantum = false;
  CHECK_NOTHROW(atten.validate());

  // enough added noise restores complete positivity
  GaussianChannelSpec healed = atten;
  healed.quantum = true;
  healed.y_matrix = Eigen::MatrixXd::Identity(2, 2);
  CHECK_NOTHROW(healed.validate());
}

TEST_CASE("channel application preserves normalization") {
  props::Rng rng(73);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = props::random_density(4, rng);
    const KrausChannel ch = props::random_kraus_channel(4, 4, 3, rng);
    CHECK(std::abs(ch.apply_matrix(rho.matrix()).trace().real() - 1.0) < 1e-10);
  }
  const Eigen::VectorXd grid = toy::make_grid(-6.0, 6.0, 120);
  const ClassicalState rho = toy::discretize(toy::ToyHamiltonian{1.0, 0.0, 0.0}, grid);
  const StochasticChannel conv = build_gaussian_convolution(grid, 0.7);
  CHECK(std::abs(conv.apply(rho).probs().sum() - 1.0) < 1e-12);
}
