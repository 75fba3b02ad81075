#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qnuis/errors.hpp"
#include "qnuis/qfisher.hpp"
#include "qnuis/zoo.hpp"
#include "support.hpp"

using namespace qnuis;
using namespace testing;

namespace {

LocalModel random_local(std::mt19937_64& rng, int d, int k) {
  CMat rho = random_density(rng, d);
  std::vector<CMat> ds;
  for (int i = 0; i < k; ++i) ds.push_back(random_hermitian(rng, d, true));
  return LocalModel(rho, ds);
}

RMat clock_fisher(double t, double g) {
  double e = std::exp(2.0 * g * t) - 1.0;
  RMat j(2, 2);
  j << std::exp(-2.0 * g * t) + g * g / e, g * t / e, g * t / e, t * t / e;
  return j;
}

}  // namespace

TEST_CASE("SLD agrees with the Kronecker-form Lyapunov solution") {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 4}) {
    LocalModel lm = random_local(rng, d, 3);
    LogDerivativeSet s = sld(lm);
    for (int i = 0; i < 3; ++i) {
      CMat oracle = lyapunov_sld(lm.rho(), lm.derivatives()[i]);
      CHECK(max_abs(s.operators[i] - oracle) < 1e-10);
      CHECK(max_abs(0.5 * (s.operators[i] * lm.rho() + lm.rho() * s.operators[i]) - lm.derivatives()[i]) < 1e-10);
      CHECK(hermiticity_defect(s.operators[i]) < 1e-12);
    }
  }
}

TEST_CASE("RLD solves d rho = rho L") {
  std::mt19937_64 rng(12);
  for (int d : {2, 3}) {
    LocalModel lm = random_local(rng, d, 2);
    LogDerivativeSet r = rld(lm);
    for (int i = 0; i < 2; ++i) {
      CHECK(max_abs(lm.rho() * r.operators[i] - lm.derivatives()[i]) < 1e-10);
      CHECK(max_abs(r.operators[i] - lm.rho().inverse() * lm.derivatives()[i]) < 1e-9);
    }
  }
}

TEST_CASE("log-derivative residuals on zoo models at random points") {
  std::mt19937_64 rng(13);
  for (const char* name : {"qubit-clock", "qubit-clock-orthogonal", "dice", "bloch-qubit"}) {
    StateModel m = zoo_build(name);
    for (int k = 0; k < 100; ++k) {
      RVec x = random_point(m, rng);
      LocalModel lm = local_model(m, x);
      LogDerivativeSet s = sld(lm), r = rld(lm);
      for (int i = 0; i < m.dim_param(); ++i) {
        const CMat& d = lm.derivatives()[i];
        CHECK(max_abs(0.5 * (s.operators[i] * lm.rho() + lm.rho() * s.operators[i]) - d) < 1e-10);
        CHECK(max_abs(lm.rho() * r.operators[i] - d) < 1e-10);
      }
    }
  }
}

TEST_CASE("Fisher matrices: symmetry, Hermiticity and SLD <= Re RLD inverse ordering") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    LocalModel lm = random_local(rng, 3, 3);
    QFIM js = sld_fisher(lm), jr = rld_fisher(lm);
    CHECK(js.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((js.real() - js.real().transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(max_abs(jr.entries - jr.entries.adjoint()) < 1e-12);
    // (J^R)^{-1} >= ... : Re (J^R)^{-1} <= (J^S)^{-1}
    RMat gap = js.real().inverse() - RMat(jr.entries.inverse().real());
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (gap + gap.transpose()));
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("qubit clock SLD Fisher matrix closed form") {
  StateModel m = zoo_build("qubit-clock");
  for (double t : {0.3, 1.0, 2.5})
    for (double g : {0.05, 0.1, 0.7}) {
      RVec x(2);
      x << t, g;
      RMat j = sld_fisher(local_model(m, x)).real();
      CHECK((j - clock_fisher(t, g)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("commutation operator solves its defining equation") {
  std::mt19937_64 rng(15);
  const cplx i(0.0, 1.0);
  for (int d : {2, 3, 4}) {
    LocalModel lm = random_local(rng, d, 1);
    CMat x = random_hermitian(rng, d);
    CMat dx = commutation_operator(lm, x);
    CHECK(max_abs(lm.rho() * x - x * lm.rho() - i * (lm.rho() * dx + dx * lm.rho())) < 1e-10);
    CHECK(hermiticity_defect(dx) < 1e-12);
    CHECK(max_abs(dx - commutation_operator(lm.rho(), x)) < 1e-12);
  }
}

TEST_CASE("dual operators are biorthogonal to the derivatives") {
  std::mt19937_64 rng(16);
  LocalModel lm = random_local(rng, 3, 3);
  LogDerivativeSet s = sld(lm);
  std::vector<CMat> dual = dual_operators(s, fisher_matrix(s, lm.rho()));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(std::abs((lm.derivatives()[b] * dual[a]).trace() - cplx(a == b ? 1.0 : 0.0)) < 1e-10);
  // Re Z of the SLD duals is the inverse SLD Fisher matrix.
  CMat z = z_matrix(dual, lm.rho());
  CHECK((z.real() - sld_fisher(lm).real().inverse()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("inner products") {
  std::mt19937_64 rng(17);
  CMat rho = random_density(rng, 3);
  CMat x = random_hermitian(rng, 3), y = random_hermitian(rng, 3);
  CHECK(std::abs(sld_inner(rho, x, y) - 0.5 * (rho * (y * x + x * y)).trace()) < 1e-12);
  CHECK(std::abs(rld_inner(rho, x, y) - (rho * y * x).trace()) < 1e-12);
}

TEST_CASE("singular states are rejected") {
  CMat rho = CMat::Zero(2, 2);
  rho(0, 0) = 1.0;
  CHECK_THROWS_AS(LocalModel(rho, {pauli('X')}), SingularStateError);
}
