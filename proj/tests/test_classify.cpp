#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qnuis/bounds.hpp"
#include "qnuis/classify.hpp"
#include "qnuis/zoo.hpp"
#include "support.hpp"

using namespace qnuis;
using namespace testing;

TEST_CASE("Bloch qubit") {
  StateModel m = zoo_build("bloch-qubit");
  RVec x(3);
  x << 0.3, 0.4, 0.5;
  LocalModel lm = local_model(m, x);
  CHECK(is_d_invariant(lm).value);
  CHECK_FALSE(is_asymptotically_classical(lm).value);
  CHECK_FALSE(is_classical(lm).value);
  Partition p(2, 3);
  CHECK(is_d_invariant(lm, p).value);
  CHECK_FALSE(is_asymptotically_classical(lm, p).value);
  // a single interest parameter always has a vanishing commutator term
  CHECK(is_asymptotically_classical(lm, Partition(1, 3)).value);
  ClassificationReport r = classify(m, x, p);
  CHECK(r.grid.size() == 7);
  CHECK_FALSE(r.flags["quasi_classical"].value);
  CHECK(r.scope["quasi_classical"] == "grid");
  CHECK(r.diagnostics.count("effective_span_d_residual") == 1);
}

TEST_CASE("dice is classical and therefore in every class") {
  StateModel m = zoo_build("dice");
  RVec x(2);
  x << 0.2, 0.3;
  ClassificationReport r = classify(m, x, Partition(1, 2));
  for (const char* f : {"classical", "d_invariant", "asymptotically_classical", "quasi_classical"})
    CHECK_MESSAGE(r.flags[f].value, f);
}

TEST_CASE("commuting exponential family") {
  StateModel m = zoo_build("quantum-exponential", {{"F", {"ZI", "IZ", "ZZ"}}});
  RVec x(3);
  x << 0.2, -0.4, 0.3;
  LocalModel lm = local_model(m, x);
  CHECK(is_classical(lm).value);
  CHECK(is_quasi_classical(m, neighbourhood_grid(m, x), Partition(2, 3)).value);
}

TEST_CASE("exponential family with a coherent reference state is not classical") {
  StateModel m = zoo_build("quantum-exponential",
                           nlohmann::json::parse(R"({"F":["Z"],"rho0":[[0.5,0.2],[0.2,0.5]]})"));
  RVec x(1);
  x << 0.3;
  LocalModel lm = local_model(m, x);
  CHECK_FALSE(is_classical(lm).value);
  CHECK(is_asymptotically_classical(lm).value);
}

TEST_CASE("generic random instances are in no class") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    Instance in = random_slice(rng, 3, 3);
    LocalModel lm = local_model(in.model, in.point);
    Partition p(2, 3);
    CHECK_FALSE(is_d_invariant(lm, p).value);
    CHECK_FALSE(is_asymptotically_classical(lm, p).value);
    CHECK_FALSE(is_classical(lm).value);
  }
}

TEST_CASE("flags agree with bound coincidences") {
  std::mt19937_64 rng(42);
  std::vector<std::pair<StateModel, RVec>> cases;
  RVec b(3);
  b << 0.3, 0.4, 0.5;
  cases.push_back({zoo_build("bloch-qubit"), b});
  RVec c(2);
  c << 1.0, 0.1;
  cases.push_back({zoo_build("qubit-clock"), c});
  for (int k = 0; k < 3; ++k) {
    Instance in = random_slice(rng, 2, 3);
    cases.push_back({in.model, in.point});
  }
  for (auto& [m, x] : cases) {
    LocalModel lm = local_model(m, x);
    for (int di = 1; di < m.dim_param(); ++di) {
      Partition p(di, m.dim_param());
      WeightMatrix w = WeightMatrix::identity(di);
      double s = sld_cr(lm, p, w), r = rld_cr(lm, p, w), h = holevo_numeric(lm, p, w).value;
      double scale = std::max(1.0, h);
      CHECK(is_d_invariant(lm, p).value == (std::abs(h - r) < 1e-5 * scale));
      CHECK(is_asymptotically_classical(lm, p).value == (std::abs(h - s) < 1e-5 * scale));
    }
  }
}

TEST_CASE("neighbourhood grid stays in the domain") {
  StateModel m = zoo_build("qubit-clock");
  RVec x(2);
  x << 0.01, 0.1;
  for (const RVec& g : neighbourhood_grid(m, x, 0.05)) CHECK(m.in_domain(g));
}
