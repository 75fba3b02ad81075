#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "qnuis/bounds.hpp"
#include "qnuis/classical.hpp"
#include "qnuis/classify.hpp"
#include "qnuis/errors.hpp"
#include "qnuis/measurement.hpp"
#include "qnuis/nuisance.hpp"
#include "qnuis/output.hpp"
#include "qnuis/zoo.hpp"

using namespace qnuis;
using nlohmann::json;

namespace {

struct Common {
  std::string model;
  std::string spec_file;
  std::string config = "{}";
  std::string point;
  int interest = 0;
  std::string output = "json";
  int threads = 0;
  std::uint64_t seed = 20240601;
};

struct Resolved {
  std::string name;
  StateModel model;
  std::optional<RVec> point;
  std::optional<int> interest;
};

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse " + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

RVec to_vec(const std::vector<double>& v) { return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size())); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return json::parse(in);
}

Resolved resolve(const Common& c) {
  ModelSpec spec;
  if (!c.spec_file.empty()) {
    spec = parse_model_spec(read_json_file(c.spec_file));
  } else if (!c.model.empty()) {
    spec.zoo = c.model;
    spec.config = json::parse(c.config);
  } else {
    throw ConfigError("no model given (use --model or --spec)");
  }
  Resolved r{spec.zoo, zoo_build(spec.zoo, spec.config), spec.point, spec.partition};
  if (!c.point.empty()) r.point = to_vec(split_numbers(c.point, ',', "point"));
  if (c.interest > 0) r.interest = c.interest;
  if (r.point && r.point->size() != r.model.dim_param())
    throw DimensionError("point has " + std::to_string(r.point->size()) + " entries, the model has " +
                         std::to_string(r.model.dim_param()) + " parameters");
  return r;
}

RVec require_point(const Resolved& r) {
  if (!r.point) throw ConfigError("no point given (use --point or the spec's 'point')");
  return *r.point;
}

Partition partition_of(const Resolved& r) {
  return Partition(r.interest.value_or(r.model.dim_param()), r.model.dim_param());
}

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QNUIS_THREADS")) {
    try {
      int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("QNUIS_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

WeightMatrix parse_weight(const std::string& text, int d) {
  if (text.empty() || text == "identity") return WeightMatrix::identity(d);
  json j = json::parse(text);
  if (!j.is_array()) throw ConfigError("weight must be 'identity' or a JSON matrix");
  RMat w(j.size(), j.empty() ? 0 : j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != static_cast<std::size_t>(w.cols())) throw ConfigError("weight rows differ in length");
    for (std::size_t k = 0; k < j[i].size(); ++k) w(i, k) = j[i][k].get<double>();
  }
  if (w.rows() != d) throw DimensionError("weight matrix does not match the number of interest parameters");
  return WeightMatrix(w);
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

POVM parse_povm(const std::string& text, int d) {
  if (text.empty() || text == "computational") return computational_basis(d);
  if (text == "pauli") {
    if (d != 2) throw DimensionError("the Pauli POVM needs a qubit model");
    return pauli_povm();
  }
  if (text == "ic") return default_ic_povm(d);
  json j = read_json_file(text);
  if (!j.contains("effects") || !j["effects"].is_array()) throw ConfigError("POVM file needs an 'effects' list");
  std::vector<CMat> effects;
  for (const auto& e : j["effects"]) effects.push_back(parse_matrix(e));
  std::vector<std::string> labels;
  if (j.contains("labels"))
    for (const auto& l : j["labels"]) labels.push_back(l.get<std::string>());
  POVM p = make_povm(effects, labels);
  if (p.dim() != d) throw DimensionError("POVM dimension does not match the model");
  return p;
}

void emit(const Common& c, const json& j, const std::string& csv) {
  if (c.output == "csv") std::cout << csv;
  else std::cout << j.dump() << "\n";
}

void add_common(CLI::App* sub, Common& c, bool with_point = true) {
  sub->add_option("--model", c.model, "zoo model name");
  sub->add_option("--spec", c.spec_file, "JSON model spec file {zoo, config, point, partition}");
  sub->add_option("--config", c.config, "zoo configuration as a JSON object");
  if (with_point) sub->add_option("--point", c.point, "parameter point, comma separated");
  sub->add_option("--interest", c.interest, "number of leading interest parameters");
  sub->add_option("--output", c.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "worker threads (default: QNUIS_THREADS or all cores)");
  sub->add_option("--seed", c.seed, "random seed");
}

int run(int argc, char** argv) {
  CLI::App app{"Precision bounds for quantum and classical estimation with nuisance parameters"};
  app.require_subcommand(1);
  Common c;

  std::string weight = "identity", bounds_list = "sld,rld,holevo";
  int starts = 8;
  auto* bound = app.add_subcommand("bound", "evaluate precision bounds at a point");
  add_common(bound, c);
  bound->add_option("--weight", weight, "'identity' or a JSON matrix");
  bound->add_option("--bounds", bounds_list, "comma separated: sld,rld,holevo,nagaoka,holevo_closed,loss_sld,loss_holevo");
  bound->add_option("--starts", starts, "random starts of the Holevo optimizer");

  double radius = 0.05;
  auto* cls = app.add_subcommand("classify", "classify the model at a point");
  add_common(cls, c);
  cls->add_option("--radius", radius, "half-width of the neighbourhood grid for the quasi-classical test");

  std::string start, grid;
  double max_step = 0.0;
  auto* orth = app.add_subcommand("orthogonalize", "integrate orthogonal nuisance coordinates along the interest parameter");
  add_common(orth, c, false);
  orth->add_option("--start", start, "starting point, comma separated")->required();
  orth->add_option("--grid", grid, "interest grid a:b:step")->required();
  orth->add_option("--max-step", max_step, "largest integrator step (0: one step per grid interval)");

  std::string strategy = "repetitive", estimator = "locally-unbiased", povm_name;
  long long n_copies = 1000;
  int trials = 100, refinements = 1;
  double first_exponent = 0.6, refine_exponent = 0.8;
  bool per_trial = false;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimation experiment");
  add_common(sim, c);
  sim->add_option("--strategy", strategy, "repetitive or two-step")->check(CLI::IsMember({"repetitive", "two-step"}));
  sim->add_option("--estimator", estimator, "locally-unbiased or mle")->check(CLI::IsMember({"locally-unbiased", "mle"}));
  sim->add_option("--n", n_copies, "copies per trial");
  sim->add_option("--trials", trials, "number of trials");
  sim->add_option("--povm", povm_name, "repetitive POVM: computational, pauli, ic or a JSON file");
  sim->add_option("--first-stage-exponent", first_exponent, "two-step: first stage uses ceil(n^e) copies");
  sim->add_option("--refinements", refinements, "two-step: pilot refinement batches");
  sim->add_option("--refinement-exponent", refine_exponent, "two-step: refinement batches use ceil(n^e) copies");
  sim->add_flag("--per-trial", per_trial, "include every trial's estimate");

  std::string counts_file;
  bool list = false;
  auto* mdl = app.add_subcommand("model", "inspect a model, or fit it to outcome counts");
  add_common(mdl, c);
  mdl->add_flag("--list", list, "list the zoo models");
  mdl->add_option("--povm", povm_name, "POVM for --counts: computational, pauli, ic or a JSON file");
  mdl->add_option("--counts", counts_file, "CSV of label,count rows; prints the maximum-likelihood fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const int threads = thread_count(c.threads);

  if (*bound) {
    Resolved r = resolve(c);
    RVec theta = require_point(r);
    Partition p = partition_of(r);
    HolevoOptions opt;
    opt.random_starts = starts;
    opt.seed = c.seed;
    opt.threads = threads;
    BoundReport rep = compute_bounds(r.model, theta, p, parse_weight(weight, p.d_interest()), split_names(bounds_list), opt);
    json j = to_json(rep);
    j["model"] = r.name;
    emit(c, j, to_csv(rep));
  } else if (*cls) {
    Resolved r = resolve(c);
    RVec theta = require_point(r);
    std::optional<Partition> p;
    if (r.interest) p = partition_of(r);
    ClassificationReport rep = classify(r.model, theta, p, neighbourhood_grid(r.model, theta, radius));
    json j = to_json(rep);
    j["model"] = r.name;
    emit(c, j, to_csv(rep));
  } else if (*orth) {
    Resolved r = resolve(c);
    RVec s = to_vec(split_numbers(start, ',', "start"));
    std::vector<double> g = split_numbers(grid, ':', "grid");
    if (g.size() != 3 || !(g[2] > 0.0) || g[1] < g[0]) throw ConfigError("grid must be a:b:step with a <= b and step > 0");
    std::vector<double> xs;
    const long long count = static_cast<long long>(std::floor((g[1] - g[0]) / g[2] + 1e-9));
    for (long long k = 0; k <= count; ++k) xs.push_back(g[0] + static_cast<double>(k) * g[2]);
    OdeOptions o;
    o.max_step = max_step;
    std::vector<TrajectoryPoint> t = global_orthogonalize_ode(r.model, s, xs, o);
    json j = to_json(t);
    j["model"] = r.name;
    emit(c, j, to_csv(t));
  } else if (*sim) {
    Resolved r = resolve(c);
    RVec theta = require_point(r);
    if (n_copies < 10) throw ConfigError("simulation needs at least 10 copies");
    if (trials < 2) throw ConfigError("simulation needs at least 2 trials");
    SimulationConfig cfg;
    cfg.strategy = strategy == "two-step" ? Strategy::TwoStep : Strategy::Repetitive;
    cfg.estimator = estimator == "mle" ? EstimatorKind::MLE : EstimatorKind::LocallyUnbiased;
    cfg.n_copies = n_copies;
    cfg.trials = trials;
    cfg.seed = c.seed;
    cfg.threads = threads;
    cfg.first_stage_exponent = first_exponent;
    cfg.refinements = refinements;
    cfg.refinement_exponent = refine_exponent;
    if (!povm_name.empty()) cfg.povm = parse_povm(povm_name, r.model.dim_hilbert());
    SimulationResult res = simulate(r.model, theta, partition_of(r), cfg, r.name);
    emit(c, to_json(res, per_trial), to_csv(res, per_trial));
  } else if (*mdl) {
    if (list) {
      json j = zoo_names();
      std::string csv = csv_row({"model"});
      for (const auto& n : zoo_names()) csv += csv_row({n});
      emit(c, j, csv);
      return 0;
    }
    Resolved r = resolve(c);
    if (!counts_file.empty()) {
      POVM povm = parse_povm(povm_name, r.model.dim_hilbert());
      std::ifstream in(counts_file);
      if (!in) throw ConfigError("cannot open '" + counts_file + "'");
      RVec counts = read_counts_csv(in, povm.labels);
      MleResult fit = mle(induced_model(r.model, povm), counts, r.point);
      json j;
      j["model"] = r.name;
      j["theta"] = to_json(fit.theta);
      j["converged"] = fit.converged;
      j["at_boundary"] = fit.at_boundary;
      j["iterations"] = fit.iterations;
      j["log_likelihood"] = sig9(fit.log_likelihood);
      std::string csv = csv_row({"parameter", "estimate"});
      for (int i = 0; i < r.model.dim_param(); ++i) csv += csv_row({r.model.labels()[i], format_number(fit.theta(i))});
      emit(c, j, csv);
      return 0;
    }
    RVec theta = require_point(r);
    LocalModel lm = local_model(r.model, theta);
    json j;
    j["model"] = r.name;
    j["labels"] = r.model.labels();
    j["dim_hilbert"] = r.model.dim_hilbert();
    j["dim_param"] = r.model.dim_param();
    j["point"] = to_json(theta);
    j["state"] = to_json(lm.rho());
    j["sld_fisher"] = to_json(sld_fisher(lm).real());
    QFIM rld = rld_fisher(lm);
    j["rld_fisher"] = to_json(rld.entries);
    std::string csv = csv_row({"i", "j", "sld_fisher"});
    RMat js = sld_fisher(lm).real();
    for (int a = 0; a < js.rows(); ++a)
      for (int b = 0; b < js.cols(); ++b) csv += csv_row({std::to_string(a + 1), std::to_string(b + 1), format_number(js(a, b))});
    emit(c, j, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
    return e.category() == ErrorCategory::Input ? 2 : 3;
  } catch (const json::exception& e) {
    std::cerr << "error (json): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
