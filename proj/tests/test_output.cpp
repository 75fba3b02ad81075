#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qnuis/output.hpp"
#include "qnuis/zoo.hpp"

using namespace qnuis;

TEST_CASE("nine significant digits") {
  CHECK(sig9(1.2345678912345) == 1.23456789);
  CHECK(sig9(-0.000123456789876) == -0.000123456790);
  CHECK(sig9(0.0) == 0.0);
  CHECK(sig9(1e300) == 1e300);
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("CSV quoting round trip") {
  std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "two\nlines", ""};
  std::string row = csv_row(fields);
  std::istringstream in(row + csv_row({"a", "b"}));
  CHECK(row.substr(row.size() - 2) == "\r\n");
  auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == fields);
  CHECK(rows[1] == std::vector<std::string>{"a", "b"});
  CHECK(csv_escape("x\"y") == "\"x\"\"y\"");
  CHECK(csv_escape("xy") == "xy");
}

TEST_CASE("bound report serialization") {
  RVec x(2);
  x << 1.0, 0.1;
  BoundReport r = compute_bounds(zoo_build("qubit-clock"), x, Partition(1, 2), WeightMatrix::identity(1), {"sld"});
  nlohmann::json j = to_json(r);
  CHECK(j["sld"].get<double>() == sig9(std::exp(0.2)));
  CHECK(j["d_interest"] == 1);
  CHECK(j.dump() == to_json(r).dump());
  std::istringstream in(to_csv(r));
  auto rows = parse_csv(in);
  CHECK(rows.size() >= 2);
}

TEST_CASE("simulation CSV forms") {
  SimulationResult r;
  r.truth = RVec::Constant(1, 1.0);
  r.d_interest = 1;
  r.mse = RMat::Constant(1, 1, 0.01);
  r.scaled_mse = RMat::Constant(1, 1, 1.0);
  r.bias = RVec::Zero(1);
  r.target = RMat::Constant(1, 1, 1.0);
  r.trials = 2;
  r.estimates = {RVec::Constant(1, 0.9), RVec::Constant(1, 1.1)};
  std::istringstream per(to_csv(r, true));
  auto rows = parse_csv(per);
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0][0] == "trial");
  CHECK(rows[0][1] == "estimate1");
  CHECK(rows[2][1] == "1.1");
  nlohmann::json j = to_json(r, true);
  CHECK(j["estimates"].size() == 2);
}
