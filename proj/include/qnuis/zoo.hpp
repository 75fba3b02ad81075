#ifndef QNUIS_ZOO_HPP
#define QNUIS_ZOO_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qnuis/model.hpp"

namespace qnuis {

CMat pauli(char name);
// Tensor product of single-qubit Paulis, e.g. "XZ".
CMat pauli_string(const std::string& word);
// Generalized Gell-Mann matrices scaled so that tr(H_i H_j) = delta_ij.
// For d = 2 the order is sigma_x, sigma_y, sigma_z (each divided by sqrt 2).
std::vector<CMat> orthonormal_traceless_basis(int d);

// Accepts a Pauli word or a list of rows whose entries are numbers or [re, im] pairs.
CMat parse_matrix(const nlohmann::json& j);

std::vector<std::string> zoo_names();
StateModel zoo_build(const std::string& name, const nlohmann::json& config = nlohmann::json::object());

struct ModelSpec {
  std::string zoo;
  nlohmann::json config = nlohmann::json::object();
  std::optional<RVec> point;
  std::optional<int> partition;
};

ModelSpec parse_model_spec(const nlohmann::json& j);

}  // namespace qnuis

#endif
