#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qnuis/bounds.hpp"
#include "qnuis/errors.hpp"
#include "qnuis/nuisance.hpp"
#include "qnuis/zoo.hpp"
#include "support.hpp"

using namespace qnuis;
using namespace testing;

TEST_CASE("partial Fisher matrix is the Schur complement") {
  RMat j(3, 3);
  j << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  PartialFisher pf = partial_fisher(QFIM{FisherKind::SLD, j.cast<cplx>(), RVec()}, Partition(1, 3));
  RMat inv = j.inverse();
  CHECK(pf.real()(0, 0) == doctest::Approx(1.0 / inv(0, 0)).epsilon(1e-12));
  PartialFisher whole = partial_fisher(QFIM{FisherKind::SLD, j.cast<cplx>(), RVec()}, Partition::full(3));
  CHECK((whole.real() - j).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dice partial and known-nuisance information") {
  StateModel m = zoo_build("dice");
  RVec x(2);
  x << 0.2, 0.3;
  LocalModel lm = local_model(m, x);
  PartialFisher pf = partial_fisher(sld_fisher(lm), Partition(1, 2));
  CHECK(1.0 / pf.real()(0, 0) == doctest::Approx(0.16).epsilon(1e-12));
  LossReport loss = information_loss(m, x, Partition(1, 2), WeightMatrix::identity(1), BoundKind::SLD);
  CHECK(std::abs(loss.nuisance_known - 1.0 / (1.0 / 0.2 + 1.0 / 0.5)) < 1e-9);
  CHECK(std::abs(loss.loss - 0.2 * 0.2 * 0.3 / 0.7) < 1e-9);
}

TEST_CASE("effective SLDs are orthogonal to the nuisance SLDs and reproduce the partial information") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Instance in = random_slice(rng, 3, 4);
    LocalModel lm = local_model(in.model, in.point);
    Partition p(2, 4);
    std::vector<CMat> eff = effective_slds(lm, p);
    LogDerivativeSet s = sld(lm);
    for (int i = 0; i < 2; ++i)
      for (int k = 2; k < 4; ++k) CHECK(std::abs(sld_inner(lm.rho(), eff[i], s.operators[k])) < 1e-9);
    RMat g(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g(a, b) = sld_inner(lm.rho(), eff[a], eff[b]).real();
    CHECK((g - partial_fisher(sld_fisher(lm), p).real()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("effective RLDs reproduce the partial RLD information") {
  std::mt19937_64 rng(22);
  Instance in = random_slice(rng, 3, 3);
  LocalModel lm = local_model(in.model, in.point);
  Partition p(1, 3);
  std::vector<CMat> eff = effective_rlds(lm, p);
  cplx g = rld_inner(lm.rho(), eff[0], eff[0]);
  CHECK(std::abs(g - partial_fisher(rld_fisher(lm), p).entries(0, 0)) < 1e-9);
}

TEST_CASE("local orthogonalization block-diagonalizes the Fisher matrix at the reference") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    Instance in = random_slice(rng, 3, 4);
    Partition p(2, 4);
    OrthoTransform tr = local_orthogonalize(in.model, in.point, p);
    StateModel om = orthogonalized_model(in.model, tr);
    RVec xi = tr.to_xi(in.point);
    CHECK((tr.to_theta(xi) - in.point).cwiseAbs().maxCoeff() < 1e-14);
    RMat j = sld_fisher(local_model(om, xi)).real();
    CHECK(j.topRightCorner(2, 2).cwiseAbs().maxCoeff() < 1e-9);
    RMat j_theta = sld_fisher(local_model(in.model, in.point)).real();
    CHECK((tr.transform(j_theta) - j).cwiseAbs().maxCoeff() < 1e-9);
    // interest block of the inverse is unchanged
    CHECK((j.inverse().topLeftCorner(2, 2) - j_theta.inverse().topLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("global orthogonalization of the qubit clock") {
  StateModel m = zoo_build("qubit-clock");
  RVec start(2);
  start << 0.5, 0.1;
  std::vector<double> grid;
  for (int k = 0; k <= 30; ++k) grid.push_back(0.5 + 0.05 * k);
  std::vector<TrajectoryPoint> tr = global_orthogonalize_ode(m, start, grid);
  REQUIRE(tr.size() == grid.size());
  for (const auto& p : tr) {
    // gamma t is conserved: the exact curve is gamma = 0.05 / t
    CHECK(std::abs(p.theta(1) * p.theta(0) - 0.05) < 1e-6);
    CHECK(p.orthogonality < 1e-6);
    CHECK(std::abs(1.0 / p.tangent_fisher - p.inverse_fisher_11) < 1e-6);
  }
}

TEST_CASE("global orthogonalization errors") {
  StateModel m = zoo_build("qubit-clock");
  RVec start(2);
  start << 0.5, 0.1;
  CHECK_THROWS_AS(global_orthogonalize_ode(m, start, {}), ConfigError);
  CHECK_THROWS_AS(global_orthogonalize_ode(m, start, {1.0, 0.9, 1.2}), ConfigError);
  CHECK_THROWS_AS(global_orthogonalize_ode(zoo_build("quantum-exponential", {{"F", {"Z"}}}), RVec::Zero(1), {0.1}),
                  DimensionError);
  // leaving the domain t > 0
  CHECK_THROWS_AS(global_orthogonalize_ode(m, start, {0.5, 0.0, -0.5}), StepError);
}

TEST_CASE("partial SLD information is invariant under nuisance reparametrizations") {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> nd;
  StateModel base = zoo_build("qubit-clock");
  RVec x(2);
  x << 1.0, 0.1;
  double ref = partial_fisher(sld_fisher(local_model(base, x)), Partition(1, 2)).real()(0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    // gamma = a + b (xi2 - t) + c sin(t) + e xi2^3 with b, e > 0 keeps it locally invertible
    double a = nd(rng) * 0.1, b = 1.0 + std::abs(nd(rng)), c = nd(rng) * 0.5, e = std::abs(nd(rng)) * 0.2;
    auto to = [=](const RVec& xi) {
      RVec t(2);
      t << xi(0), a + b * (xi(1) - xi(0)) + c * std::sin(xi(0)) + e * std::pow(xi(1), 3);
      return t;
    };
    auto jac = [=](const RVec& xi) {
      RMat j(2, 2);
      j << 1.0, -b + c * std::cos(xi(0)), 0.0, b + 3.0 * e * xi(1) * xi(1);
      return j;
    };
    StateModel m = reparametrize(base, {to, jac}, {{0.0, INFINITY}, {-INFINITY, INFINITY}},
                                 {"t", "nu"});
    // solve for xi2 with to(xi)(1) = 0.1 by Newton
    RVec xi(2);
    xi << 1.0, 0.1;
    for (int it = 0; it < 100; ++it) xi(1) -= (to(xi)(1) - 0.1) / jac(xi)(1, 1);
    double val = partial_fisher(sld_fisher(local_model(m, xi)), Partition(1, 2)).real()(0, 0);
    CHECK(std::abs(val - ref) < 1e-8);
  }
}
