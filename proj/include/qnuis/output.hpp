#ifndef QNUIS_OUTPUT_HPP
#define QNUIS_OUTPUT_HPP

#include <istream>
#include <json.hpp>
#include <string>
#include <vector>

#include "qnuis/bounds.hpp"
#include "qnuis/classify.hpp"
#include "qnuis/linalg.hpp"
#include "qnuis/measurement.hpp"
#include "qnuis/nuisance.hpp"

namespace qnuis {

// Rounds to 9 significant digits so that JSON output is stable.
double sig9(double x);
nlohmann::json to_json(const RVec& v);
nlohmann::json to_json(const RMat& m);
nlohmann::json to_json(const CMat& m);  // [[ [re, im], ... ], ...]

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const std::vector<TrajectoryPoint>& t);
nlohmann::json to_json(const SimulationResult& r, bool include_estimates = false);

std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);
std::string format_number(double x);
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

std::string to_csv(const BoundReport& r);
std::string to_csv(const ClassificationReport& r);
std::string to_csv(const std::vector<TrajectoryPoint>& t);
// One row per interest component, or one row per trial.
std::string to_csv(const SimulationResult& r, bool per_trial = false);

}  // namespace qnuis

#endif
