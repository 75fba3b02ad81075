#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qnuis/errors.hpp"
#include "qnuis/linalg.hpp"
#include "qnuis/partition.hpp"
#include "qnuis/qfisher.hpp"
#include "qnuis/zoo.hpp"
#include "support.hpp"

using namespace qnuis;
using namespace testing;
using nlohmann::json;

namespace {

std::vector<std::pair<std::string, json>> zoo_cases() {
  return {{"qubit-clock", json::object()},
          {"qubit-clock-orthogonal", json::object()},
          {"dice", json::object()},
          {"bloch-qubit", json::object()},
          {"qudit-observable", {{"d_H", 3}}},
          {"quantum-exponential", {{"F", {"Z"}}}},
          {"quantum-exponential", {{"F", {"ZI", "IZ", "ZZ"}}}}};
}

}  // namespace

TEST_CASE("hermitian eigendecomposition reconstructs the matrix") {
  std::mt19937_64 rng(1);
  for (int d : {2, 3, 5}) {
    CMat h = random_hermitian(rng, d);
    HermitianEigen e = eig_hermitian(h);
    CHECK(max_abs(e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint() - h) < 1e-12);
    for (int i = 1; i < d; ++i) CHECK(e.values(i) >= e.values(i - 1));
  }
}

TEST_CASE("trace norm equals the sum of absolute eigenvalues for symmetric input") {
  RMat a(2, 2);
  a << 0.0, 1.5, -1.5, 0.0;
  CHECK(trace_norm(a) == doctest::Approx(3.0));
  RMat s(2, 2);
  s << 2.0, 0.0, 0.0, -1.0;
  CHECK(trace_norm(s) == doctest::Approx(3.0));
}

TEST_CASE("matrix square roots and inverses") {
  RMat a(2, 2);
  a << 4.0, 1.0, 1.0, 3.0;
  RMat r = sqrt_psd(a);
  CHECK((r * r - a).cwiseAbs().maxCoeff() < 1e-12);
  RMat ir = inv_sqrt_pd(a);
  CHECK((ir * a * ir - RMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((inverse_pd(a) * a - RMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  RMat sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(inverse_pd(sing), SingularQFIMError);
  RMat ill(2, 2);
  ill << 1.0, 0.0, 0.0, 1e-14;
  CHECK_THROWS_AS(inverse_pd(ill), SingularQFIMError);
  RMat p = pseudo_inverse(sing, 1e-10);
  CHECK((sing * p * sing - sing).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partition and weight validation") {
  CHECK_THROWS_AS(Partition(0, 2), DimensionError);
  CHECK_THROWS_AS(Partition(3, 2), DimensionError);
  Partition p(1, 3);
  CHECK(p.d_nuisance() == 2);
  CHECK(p.has_nuisance());
  RMat asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(WeightMatrix{asym}, ConfigError);
  RMat semi(2, 2);
  semi << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(WeightMatrix{semi}, ConfigError);
  CHECK(WeightMatrix(semi, true).semidefinite());
}

TEST_CASE("zoo models give valid states at random points") {
  std::mt19937_64 rng(2);
  for (const auto& [name, cfg] : zoo_cases()) {
    StateModel m = zoo_build(name, cfg);
    for (int k = 0; k < 100; ++k) {
      RVec x = random_point(m, rng, 1e-3);
      CMat rho = m.evaluate(x);
      CHECK(hermiticity_defect(rho) < 1e-12);
      CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
      CHECK(eig_hermitian(rho).values.minCoeff() > 0.0);
      for (const CMat& d : m.derivatives(x)) {
        CHECK(hermiticity_defect(d) < 1e-12);
        CHECK(std::abs(d.trace()) < 1e-10);
      }
    }
  }
}

TEST_CASE("analytic and finite-difference derivatives agree on zoo models") {
  std::mt19937_64 rng(3);
  for (const auto& [name, cfg] : zoo_cases()) {
    StateModel m = zoo_build(name, cfg);
    for (int k = 0; k < 20; ++k) {
      RVec x = random_point(m, rng, 0.02);
      std::vector<CMat> a = m.derivatives(x), f = m.finite_difference_derivatives(x);
      for (std::size_t i = 0; i < a.size(); ++i) {
        double scale = std::max(1.0, max_abs(a[i]));
        CHECK(max_abs(a[i] - f[i]) / scale < 10.0 * m.fd_step() * m.fd_step());
      }
    }
  }
}

TEST_CASE("qudit-observable with d=2 matches the Bloch model up to scaling") {
  StateModel q = zoo_build("qudit-observable", {{"d_H", 2}});
  StateModel b = zoo_build("bloch-qubit");
  RVec x(3);
  x << 0.3, 0.4, 0.5;
  RVec y = x / std::sqrt(2.0);  // rho = I/2 + sum y_i sigma_i / sqrt 2
  CHECK(max_abs(q.evaluate(y) - b.evaluate(x)) < 1e-14);
  RMat jq = sld_fisher(local_model(q, y)).real();
  RMat jb = sld_fisher(local_model(b, x)).real();
  CHECK((jq / 2.0 - jb).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("domain and shape errors") {
  StateModel m = zoo_build("qubit-clock");
  RVec bad(2);
  bad << -1.0, 0.1;
  CHECK_THROWS_AS(m.evaluate(bad), DomainError);
  CHECK_THROWS_AS(m.evaluate(RVec::Ones(3)), DimensionError);
  CHECK_THROWS_AS(zoo_build("nope"), ConfigError);
  CHECK_THROWS_AS(zoo_build("qubit-clock", {{"extra", 1}}), ConfigError);
  CHECK_THROWS_AS(zoo_build("quantum-exponential", {{"F", {"X", "Z"}}}), ConfigError);
  RVec outside(3);
  outside << 0.8, 0.8, 0.0;
  CHECK_THROWS_AS(zoo_build("bloch-qubit").evaluate(outside), DomainError);
}

TEST_CASE("a non-positive state is rejected") {
  StateModel m(2, 1, [](const RVec& x) {
    CMat r(2, 2);
    r << x(0), 0.0, 0.0, 1.0 - x(0);
    return r;
  }, {}, {Interval{-1.0, 2.0}});
  RVec x(1);
  x << 1.5;
  CHECK_THROWS_AS(m.evaluate(x), ModelError);
}

TEST_CASE("irregular models are rejected") {
  StateModel m(2, 2, [](const RVec& x) {
    CMat r(2, 2);
    double z = 0.3 * (x(0) + x(1));
    r << 0.5 + z, 0.0, 0.0, 0.5 - z;
    return r;
  }, {}, {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}});
  RVec x = RVec::Zero(2);
  CHECK_THROWS_AS(m.derivatives(x), RegularityError);
}

TEST_CASE("reparametrization applies the chain rule") {
  StateModel base = zoo_build("qubit-clock");
  // (t, s) with gamma = s / t
  Reparametrization map{[](const RVec& xi) {
                          RVec t(2);
                          t << xi(0), xi(1) / xi(0);
                          return t;
                        },
                        [](const RVec& xi) {
                          RMat j(2, 2);
                          j << 1.0, -xi(1) / (xi(0) * xi(0)), 0.0, 1.0 / xi(0);
                          return j;
                        }};
  StateModel m = reparametrize(base, map, {{0.0, INFINITY}, {0.0, INFINITY}});
  RVec xi(2);
  xi << 1.3, 0.2;
  std::vector<CMat> a = m.derivatives(xi), f = m.finite_difference_derivatives(xi);
  for (int i = 0; i < 2; ++i) CHECK(max_abs(a[i] - f[i]) < 1e-8);
}

TEST_CASE("fixing trailing parameters keeps the leading block") {
  StateModel base = zoo_build("bloch-qubit");
  RVec x(3);
  x << 0.3, 0.4, 0.5;
  StateModel sub = fix_trailing_parameters(base, x, 2);
  CHECK(sub.dim_param() == 2);
  CHECK(max_abs(sub.evaluate(x.head(2)) - base.evaluate(x)) < 1e-15);
  RMat js = sld_fisher(local_model(sub, x.head(2))).real();
  RMat jb = sld_fisher(local_model(base, x)).real();
  CHECK((js - jb.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("model spec parsing") {
  ModelSpec s = parse_model_spec(json::parse(R"({"zoo":"qubit-clock","point":[1,0.1],"partition":1})"));
  CHECK(s.zoo == "qubit-clock");
  CHECK(s.point->size() == 2);
  CHECK(*s.partition == 1);
  CHECK_THROWS_AS(parse_model_spec(json::parse(R"({"zoo":"dice","bogus":1})")), ConfigError);
  CHECK_THROWS_AS(parse_model_spec(json::parse(R"({"config":{}})")), ConfigError);
  CHECK_THROWS_AS(parse_model_spec(json::parse(R"({"zoo":"dice","point":["a"]})")), ConfigError);
}

TEST_CASE("matrix parsing") {
  CHECK(max_abs(parse_matrix("XZ") - pauli_string("XZ")) == 0.0);
  CMat m = parse_matrix(json::parse("[[1,[0,-1]],[[0,1],2]]"));
  CHECK(m(0, 1) == cplx(0.0, -1.0));
  CHECK_THROWS_AS(parse_matrix(json::parse("[[1,2]]")), ConfigError);
  CHECK_THROWS_AS(parse_matrix("Q"), ConfigError);
}

TEST_CASE("orthonormal traceless basis") {
  for (int d : {2, 3, 4}) {
    std::vector<CMat> b = orthonormal_traceless_basis(d);
    CHECK(static_cast<int>(b.size()) == d * d - 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(std::abs(b[i].trace()) < 1e-14);
      for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(std::abs((b[i] * b[j]).trace().real() - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}
