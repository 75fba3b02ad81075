#include "qnuis/zoo.hpp"

#include <cmath>

#include "qnuis/errors.hpp"

namespace qnuis {

using nlohmann::json;

namespace {

constexpr cplx I1(0.0, 1.0);

void reject_unknown_keys(const json& config, std::initializer_list<const char*> allowed, const std::string& model) {
  if (config.is_null()) return;
  if (!config.is_object()) throw ConfigError("config for " + model + " must be an object");
  for (auto it = config.begin(); it != config.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config key '" + it.key() + "' for model " + model);
  }
}

double min_eigenvalue(const CMat& rho) { return eig_hermitian(rho).values.minCoeff(); }

StateModel qubit_clock(const json& config) {
  reject_unknown_keys(config, {}, "qubit-clock");
  auto state = [](const RVec& x) {
    double r = std::exp(-x(1) * x(0));
    CMat rho(2, 2);
    cplx off = 0.5 * r * std::exp(I1 * x(0));
    rho << 0.5, off, std::conj(off), 0.5;
    return rho;
  };
  auto deriv = [](const RVec& x) {
    double t = x(0), g = x(1);
    double r = std::exp(-g * t);
    cplx ph = std::exp(I1 * t);
    cplx dt = 0.5 * (-g * r + I1 * r) * ph;
    cplx dg = 0.5 * (-t * r) * ph;
    CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
    a(0, 1) = dt;
    a(1, 0) = std::conj(dt);
    b(0, 1) = dg;
    b(1, 0) = std::conj(dg);
    return std::vector<CMat>{a, b};
  };
  return StateModel(2, 2, state, deriv, {{0.0, INFINITY}, {0.0, INFINITY}}, {"t", "gamma"});
}

StateModel qubit_clock_orthogonal(const json& config) {
  reject_unknown_keys(config, {}, "qubit-clock-orthogonal");
  auto state = [](const RVec& x) {
    CMat rho(2, 2);
    cplx off = 0.5 * (2.0 * x(1) - 1.0) * std::exp(I1 * x(0));
    rho << 0.5, off, std::conj(off), 0.5;
    return rho;
  };
  auto deriv = [](const RVec& x) {
    cplx ph = std::exp(I1 * x(0));
    cplx dt = 0.5 * I1 * (2.0 * x(1) - 1.0) * ph;
    cplx dp = ph;
    CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
    a(0, 1) = dt;
    a(1, 0) = std::conj(dt);
    b(0, 1) = dp;
    b(1, 0) = std::conj(dp);
    return std::vector<CMat>{a, b};
  };
  return StateModel(2, 2, state, deriv, {{0.0, INFINITY}, {0.5, 1.0}}, {"t", "p"});
}

StateModel dice(const json& config) {
  reject_unknown_keys(config, {}, "dice");
  auto state = [](const RVec& x) {
    CMat rho = CMat::Zero(3, 3);
    rho(0, 0) = x(0);
    rho(1, 1) = x(1);
    rho(2, 2) = 1.0 - x(0) - x(1);
    return rho;
  };
  auto deriv = [](const RVec&) {
    CMat a = CMat::Zero(3, 3), b = CMat::Zero(3, 3);
    a(0, 0) = 1.0;
    a(2, 2) = -1.0;
    b(1, 1) = 1.0;
    b(2, 2) = -1.0;
    return std::vector<CMat>{a, b};
  };
  auto inside = [](const RVec& x) { return x(0) + x(1) < 1.0; };
  return StateModel(3, 2, state, deriv, {{0.0, 1.0}, {0.0, 1.0}}, {"theta1", "theta2"}, inside);
}

StateModel bloch_qubit(const json& config) {
  reject_unknown_keys(config, {}, "bloch-qubit");
  std::vector<CMat> s{pauli('X'), pauli('Y'), pauli('Z')};
  auto state = [s](const RVec& x) {
    CMat rho = 0.5 * CMat::Identity(2, 2);
    for (int i = 0; i < 3; ++i) rho += 0.5 * x(i) * s[i];
    return rho;
  };
  auto deriv = [s](const RVec&) { return std::vector<CMat>{0.5 * s[0], 0.5 * s[1], 0.5 * s[2]}; };
  auto inside = [](const RVec& x) { return x.norm() < 1.0; };
  return StateModel(2, 3, state, deriv, {{-1, 1}, {-1, 1}, {-1, 1}}, {"theta1", "theta2", "theta3"}, inside);
}

StateModel qudit_observable(const json& config) {
  reject_unknown_keys(config, {"d_H", "basis"}, "qudit-observable");
  int d = 2;
  if (config.contains("d_H")) {
    if (!config["d_H"].is_number_integer()) throw ConfigError("d_H must be an integer");
    d = config["d_H"].get<int>();
  }
  if (d < 2) throw ConfigError("d_H must be at least 2");
  std::vector<CMat> basis;
  if (config.contains("basis")) {
    if (!config["basis"].is_array() || config["basis"].empty()) throw ConfigError("basis must be a non-empty list of matrices");
    for (const auto& m : config["basis"]) basis.push_back(parse_matrix(m));
    for (const auto& h : basis)
      if (h.rows() != d || h.cols() != d) throw ConfigError("basis element has the wrong dimension");
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (hermiticity_defect(basis[i]) > 1e-10) throw ConfigError("basis element is not Hermitian");
      if (std::abs(basis[i].trace()) > 1e-10) throw ConfigError("basis element is not traceless");
      for (std::size_t j = 0; j < basis.size(); ++j) {
        double ip = (basis[i] * basis[j]).trace().real();
        if (std::abs(ip - (i == j ? 1.0 : 0.0)) > 1e-10) throw ConfigError("basis is not orthonormal");
      }
    }
  } else {
    basis = orthonormal_traceless_basis(d);
  }
  const int n = static_cast<int>(basis.size());
  if (n > d * d - 1) throw ConfigError("basis has too many elements");
  auto state = [basis, d](const RVec& x) {
    CMat rho = CMat::Identity(d, d) / static_cast<double>(d);
    for (std::size_t i = 0; i < basis.size(); ++i) rho += x(i) * basis[i];
    return rho;
  };
  auto deriv = [basis](const RVec&) { return basis; };
  auto inside = [state](const RVec& x) { return min_eigenvalue(state(x)) > tol::positivity; };
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("theta" + std::to_string(i + 1));
  return StateModel(d, n, state, deriv, std::vector<Interval>(n, Interval{-1.0, 1.0}), labels, inside);
}

StateModel quantum_exponential(const json& config) {
  reject_unknown_keys(config, {"F", "rho0"}, "quantum-exponential");
  if (!config.contains("F") || !config["F"].is_array() || config["F"].empty())
    throw ConfigError("quantum-exponential requires a non-empty list F of generators");
  std::vector<CMat> f;
  for (const auto& m : config["F"]) f.push_back(parse_matrix(m));
  const int d = static_cast<int>(f[0].rows());
  for (const auto& m : f) {
    if (m.rows() != d || m.cols() != d) throw ConfigError("generators must share one square shape");
    if (hermiticity_defect(m) > 1e-10) throw ConfigError("generator is not Hermitian");
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j)
      if (max_abs(commutator(f[i], f[j])) > 1e-10) throw ConfigError("generators do not commute");
  CMat rho0 = CMat::Identity(d, d) / static_cast<double>(d);
  if (config.contains("rho0")) {
    rho0 = parse_matrix(config["rho0"]);
    if (rho0.rows() != d || rho0.cols() != d) throw ConfigError("rho0 has the wrong dimension");
    if (hermiticity_defect(rho0) > 1e-10) throw ConfigError("rho0 is not Hermitian");
    if (std::abs(rho0.trace() - cplx(1.0)) > 1e-10) throw ConfigError("rho0 does not have unit trace");
    if (min_eigenvalue(rho0) < tol::positivity) throw ConfigError("rho0 is not full rank");
    rho0 = hermitian_part(rho0);
  }
  const int n = static_cast<int>(f.size());
  // exp((H - psi)/2) rho0 exp((H - psi)/2) with H = sum_i theta_i F_i
  auto state = [f, rho0, d](const RVec& x) {
    CMat h = CMat::Zero(d, d);
    for (std::size_t i = 0; i < f.size(); ++i) h += x(i) * f[i];
    HermitianEigen e = eig_hermitian(h);
    RVec half = (0.5 * e.values.array()).exp();
    CMat half_exp = e.vectors * half.asDiagonal() * e.vectors.adjoint();
    CMat rho = half_exp * rho0 * half_exp;
    rho /= rho.trace().real();
    return hermitian_part(rho);
  };
  auto deriv = [f, state, d](const RVec& x) {
    CMat rho = state(x);
    std::vector<CMat> out;
    for (const auto& fi : f) {
      double psi_i = (rho * fi).trace().real();
      CMat c = 0.5 * (fi - psi_i * CMat::Identity(d, d));
      out.push_back(c * rho + rho * c);
    }
    return out;
  };
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("theta" + std::to_string(i + 1));
  return StateModel(d, n, state, deriv, std::vector<Interval>(n, Interval{-20.0, 20.0}), labels);
}

}  // namespace

CMat pauli(char name) {
  CMat m = CMat::Zero(2, 2);
  switch (name) {
    case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = -I1; m(1, 0) = I1; break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw ConfigError(std::string("unknown Pauli letter '") + name + "'");
  }
  return m;
}

CMat pauli_string(const std::string& word) {
  if (word.empty()) throw ConfigError("empty Pauli word");
  CMat out = CMat::Ones(1, 1);
  for (char c : word) {
    CMat p = pauli(c);
    CMat next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * p;
    out = next;
  }
  return out;
}

std::vector<CMat> orthonormal_traceless_basis(int d) {
  std::vector<CMat> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMat m = CMat::Zero(d, d);
      m(j, k) = s;
      m(k, j) = s;
      out.push_back(m);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMat m = CMat::Zero(d, d);
      m(j, k) = -I1 * s;
      m(k, j) = I1 * s;
      out.push_back(m);
    }
  for (int l = 1; l < d; ++l) {
    CMat m = CMat::Zero(d, d);
    double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -l * norm;
    out.push_back(m);
  }
  return out;
}

CMat parse_matrix(const json& j) {
  if (j.is_string()) return pauli_string(j.get<std::string>());
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a Pauli word or a non-empty list of rows");
  const std::size_t n = j.size();
  CMat m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw ConfigError("matrix must be square");
    for (std::size_t c = 0; c < n; ++c) {
      const json& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

std::vector<std::string> zoo_names() {
  return {"qubit-clock", "qubit-clock-orthogonal", "dice", "bloch-qubit", "qudit-observable", "quantum-exponential"};
}

StateModel zoo_build(const std::string& name, const json& config) {
  if (name == "qubit-clock") return qubit_clock(config);
  if (name == "qubit-clock-orthogonal") return qubit_clock_orthogonal(config);
  if (name == "dice") return dice(config);
  if (name == "bloch-qubit") return bloch_qubit(config);
  if (name == "qudit-observable") return qudit_observable(config);
  if (name == "quantum-exponential") return quantum_exponential(config);
  throw ConfigError("unknown model '" + name + "'");
}

ModelSpec parse_model_spec(const json& j) {
  if (!j.is_object()) throw ConfigError("model spec must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "zoo" && it.key() != "config" && it.key() != "point" && it.key() != "partition")
      throw ConfigError("unknown model spec key '" + it.key() + "'");
  if (!j.contains("zoo") || !j["zoo"].is_string()) throw ConfigError("model spec needs a string field 'zoo'");
  ModelSpec spec;
  spec.zoo = j["zoo"].get<std::string>();
  if (j.contains("config")) {
    if (!j["config"].is_object()) throw ConfigError("'config' must be an object");
    spec.config = j["config"];
  }
  if (j.contains("point")) {
    if (!j["point"].is_array()) throw ConfigError("'point' must be a list of numbers");
    RVec p(j["point"].size());
    for (std::size_t i = 0; i < j["point"].size(); ++i) {
      if (!j["point"][i].is_number()) throw ConfigError("'point' must be a list of numbers");
      p(i) = j["point"][i].get<double>();
    }
    spec.point = p;
  }
  if (j.contains("partition")) {
    if (!j["partition"].is_number_integer()) throw ConfigError("'partition' must be an integer");
    spec.partition = j["partition"].get<int>();
  }
  return spec;
}

}  // namespace qnuis
