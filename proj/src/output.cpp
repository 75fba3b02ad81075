#include "qnuis/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "qnuis/errors.hpp"

namespace qnuis {

using nlohmann::json;

double sig9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

json to_json(const RVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(sig9(v(i)));
  return a;
}

json to_json(const RMat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(sig9(m(i, j)));
    a.push_back(row);
  }
  return a;
}

json to_json(const CMat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({sig9(m(i, j).real()), sig9(m(i, j).imag())});
    a.push_back(row);
  }
  return a;
}

json to_json(const BoundReport& r) {
  json j;
  j["point"] = to_json(r.point);
  j["d_interest"] = r.d_interest;
  j["d_total"] = r.d_total;
  j["weight"] = to_json(r.weight);
  for (const auto& [k, v] : r.values) j[k] = sig9(v);
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = sig9(v);
  j["diagnostics"] = diag;
  json checks = json::object();
  for (const auto& [k, v] : r.checks) checks[k] = v;
  j["checks"] = checks;
  return j;
}

json to_json(const ClassificationReport& r) {
  json j;
  for (const auto& [k, f] : r.flags) j[k] = f.value;
  json res = json::object(), scope = json::object();
  for (const auto& [k, f] : r.flags) res[k] = sig9(f.residual);
  for (const auto& [k, s] : r.scope) scope[k] = s;
  j["residuals"] = res;
  j["scope"] = scope;
  j["point"] = to_json(r.point);
  j["d_interest"] = r.d_interest;
  j["d_total"] = r.d_total;
  j["grid_size"] = r.grid.size();
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = sig9(v);
  j["diagnostics"] = diag;
  return j;
}

json to_json(const std::vector<TrajectoryPoint>& t) {
  json a = json::array();
  for (const auto& p : t) {
    json e;
    e["xi1"] = sig9(p.xi1);
    e["theta"] = to_json(p.theta);
    e["tangent"] = to_json(p.tangent);
    e["orthogonality"] = sig9(p.orthogonality);
    e["inverse_fisher_11"] = sig9(p.inverse_fisher_11);
    e["tangent_fisher"] = sig9(p.tangent_fisher);
    a.push_back(e);
  }
  json j;
  j["trajectory"] = a;
  return j;
}

json to_json(const SimulationResult& r, bool include_estimates) {
  json j;
  j["model"] = r.model;
  j["strategy"] = r.strategy;
  j["estimator"] = r.estimator;
  j["truth"] = to_json(r.truth);
  j["d_interest"] = r.d_interest;
  j["n_copies"] = r.n_copies;
  j["first_stage_copies"] = r.first_stage_copies;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["mse"] = to_json(r.mse);
  j["scaled_mse"] = to_json(r.scaled_mse);
  j["bias"] = to_json(r.bias);
  j["target"] = to_json(r.target);
  j["relative_error"] = sig9(r.relative_error);
  j["boundary_trials"] = r.boundary_trials;
  if (include_estimates) {
    json e = json::array();
    for (const auto& v : r.estimates) e.push_back(to_json(v));
    j["estimates"] = e;
  }
  return j;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_escape(fields[i]);
  return out + "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty()) throw ConfigError("malformed CSV: quote inside an unquoted field");
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ConfigError("malformed CSV: unterminated quoted field");
  if (any) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv(const BoundReport& r) {
  std::string out = csv_row({"quantity", "value"});
  for (const auto& [k, v] : r.values) out += csv_row({k, format_number(v)});
  return out;
}

std::string to_csv(const ClassificationReport& r) {
  std::string out = csv_row({"class", "flag", "residual", "scope"});
  for (const auto& [k, f] : r.flags)
    out += csv_row({k, f.value ? "true" : "false", format_number(f.residual), r.scope.at(k)});
  return out;
}

std::string to_csv(const std::vector<TrajectoryPoint>& t) {
  std::vector<std::string> header{"xi1"};
  const int d = t.empty() ? 0 : static_cast<int>(t[0].theta.size());
  for (int i = 0; i < d; ++i) header.push_back("theta" + std::to_string(i + 1));
  header.insert(header.end(), {"orthogonality", "inverse_fisher_11", "tangent_fisher"});
  std::string out = csv_row(header);
  for (const auto& p : t) {
    std::vector<std::string> row{format_number(p.xi1)};
    for (int i = 0; i < d; ++i) row.push_back(format_number(p.theta(i)));
    row.push_back(format_number(p.orthogonality));
    row.push_back(format_number(p.inverse_fisher_11));
    row.push_back(format_number(p.tangent_fisher));
    out += csv_row(row);
  }
  return out;
}

std::string to_csv(const SimulationResult& r, bool per_trial) {
  if (per_trial) {
    std::vector<std::string> header{"trial"};
    for (int i = 0; i < r.d_interest; ++i) header.push_back("estimate" + std::to_string(i + 1));
    std::string out = csv_row(header);
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
      std::vector<std::string> row{std::to_string(k)};
      for (int i = 0; i < r.d_interest; ++i) row.push_back(format_number(r.estimates[k](i)));
      out += csv_row(row);
    }
    return out;
  }
  std::string out = csv_row({"component", "truth", "bias", "mse", "scaled_mse", "target"});
  for (int i = 0; i < r.d_interest; ++i)
    out += csv_row({std::to_string(i + 1), format_number(r.truth(i)), format_number(r.bias(i)),
                    format_number(r.mse(i, i)), format_number(r.scaled_mse(i, i)), format_number(r.target(i, i))});
  return out;
}

}  // namespace qnuis
