#include <algorithm>
#include <cmath>
#include <thread>

#include "qnuis/errors.hpp"
#include "qnuis/measurement.hpp"

namespace qnuis {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Pooled experiment: block k contributes weight w_k to the outcome distribution.
ClassicalModel composite_model(const std::vector<ClassicalModel>& blocks, const std::vector<double>& weights) {
  std::vector<int> offsets{0};
  for (const auto& b : blocks) offsets.push_back(offsets.back() + b.n_outcomes());
  const int total = offsets.back(), d = blocks[0].dim_param();
  auto prob = [=](const RVec& t) {
    RVec p(total);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      p.segment(offsets[k], blocks[k].n_outcomes()) = weights[k] * blocks[k].probabilities(t);
    return p;
  };
  auto deriv = [=](const RVec& t) {
    RMat m(total, d);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      m.middleRows(offsets[k], blocks[k].n_outcomes()) = weights[k] * blocks[k].derivatives(t);
    return m;
  };
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (const auto& l : blocks[k].outcome_labels()) labels.push_back("s" + std::to_string(k + 1) + ":" + l);
  auto inside = [blocks](const RVec& t) {
    for (const auto& b : blocks)
      if (!b.in_domain(t)) return false;
    return true;
  };
  return ClassicalModel(total, d, prob, deriv, blocks[0].domain(), labels, inside);
}

RVec stack(const std::vector<RVec>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  RVec out(n);
  n = 0;
  for (const auto& p : parts) {
    out.segment(n, p.size()) = p;
    n += p.size();
  }
  return out;
}

struct TrialOutcome {
  RVec estimate;
  bool boundary = false;
};

}  // namespace

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (trial + 1));
  std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
  return std::mt19937_64(seq);
}

RVec sample_counts(std::mt19937_64& rng, const RVec& probabilities, long long n) {
  RVec counts = RVec::Zero(probabilities.size());
  RVec p = probabilities.cwiseMax(0.0);
  double remaining_mass = p.sum();
  long long remaining = n;
  for (Eigen::Index x = 0; x < p.size() && remaining > 0; ++x) {
    if (x == p.size() - 1) {
      counts(x) = static_cast<double>(remaining);
      break;
    }
    double q = remaining_mass > 0.0 ? std::clamp(p(x) / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<long long> bin(remaining, q);
    long long k = bin(rng);
    counts(x) = static_cast<double>(k);
    remaining -= k;
    remaining_mass -= p(x);
  }
  return counts;
}

SimulationResult simulate(const StateModel& model, const RVec& theta, const Partition& partition,
                          const SimulationConfig& cfg, const std::string& model_name) {
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the model");
  if (cfg.n_copies < 1) throw ConfigError("number of copies must be positive");
  if (cfg.trials < 2) throw ConfigError("at least two trials are needed");
  model.check_domain(theta);
  const int di = partition.d_interest();
  const double n = static_cast<double>(cfg.n_copies);

  SimulationResult res;
  res.model = model_name;
  res.strategy = cfg.strategy == Strategy::Repetitive ? "repetitive" : "two-step";
  res.estimator = cfg.estimator == EstimatorKind::MLE ? "mle" : "locally-unbiased";
  res.truth = theta;
  res.d_interest = di;
  res.n_copies = cfg.n_copies;
  res.trials = cfg.trials;
  res.seed = cfg.seed;

  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::function<TrialOutcome(int)> run_trial;

  if (cfg.strategy == Strategy::Repetitive) {
    POVM povm = cfg.povm ? *cfg.povm : computational_basis(model.dim_hilbert());
    povm.validate();
    LocalEstimator lu = locally_unbiased_estimator(model, theta, povm, partition);
    res.target = inverse_pd(lu.partial, "partial classical Fisher matrix");
    RVec p = born_distribution(model.evaluate(theta), povm);
    ClassicalModel cm = induced_model(model, povm);
    run_trial = [=, &cfg](int trial) {
      std::mt19937_64 rng = trial_stream(cfg.seed, static_cast<std::uint64_t>(trial));
      RVec counts = sample_counts(rng, p, cfg.n_copies);
      TrialOutcome out;
      if (cfg.estimator == EstimatorKind::LocallyUnbiased) {
        out.estimate = lu.values.transpose() * counts / n;
      } else {
        MleResult r = mle(cm, counts, theta);
        out.estimate = r.theta.head(di);
        out.boundary = r.at_boundary;
      }
      return out;
    };
  } else {
    if (di != 1) throw ConfigError("the two-step strategy estimates a single interest parameter");
    const long long n1 = std::min<long long>(cfg.n_copies - 1,
                                             static_cast<long long>(std::ceil(std::pow(n, cfg.first_stage_exponent))));
    if (n1 < 1) throw ConfigError("two-step strategy needs at least two copies");
    if (cfg.refinements < 0) throw ConfigError("number of refinements must be non-negative");
    std::vector<long long> batches{n1};
    long long left = cfg.n_copies - n1;
    const long long refine = static_cast<long long>(std::ceil(std::pow(n, cfg.refinement_exponent)));
    for (int r = 0; r < cfg.refinements && left > refine; ++r) {
      batches.push_back(refine);
      left -= refine;
    }
    batches.push_back(left);
    res.first_stage_copies = n1;
    res.target = RMat::Constant(1, 1, inverse_pd(sld_fisher(local_model(model, theta)).real(), "SLD Fisher matrix")(0, 0));
    POVM ic = default_ic_povm(model.dim_hilbert());
    ClassicalModel ic_model = induced_model(model, ic, cfg.pilot_min_eigenvalue);
    CMat rho = model.evaluate(theta);
    RVec p_ic = born_distribution(rho, ic);
    run_trial = [=, &cfg, &model](int trial) {
      std::mt19937_64 rng = trial_stream(cfg.seed, static_cast<std::uint64_t>(trial));
      std::vector<ClassicalModel> blocks{ic_model};
      std::vector<RVec> counts{sample_counts(rng, p_ic, n1)};
      MleResult fit = mle(ic_model, counts[0], theta);
      TrialOutcome out;
      out.boundary = fit.at_boundary;
      long long used = n1;
      RVec pilot = fit.theta;
      double pooled = 0.0;
      for (std::size_t k = 1; k < batches.size(); ++k) {
        ScalarOptimalMeasurement opt = optimal_pvm_scalar(model, pilot, partition);
        RVec c = sample_counts(rng, born_distribution(rho, opt.pvm), batches[k]);
        if (cfg.estimator == EstimatorKind::LocallyUnbiased) {
          const double batch_sum = opt.estimates.dot(c);
          pooled += batch_sum;
          RVec moved = pilot;
          moved(0) = batch_sum / static_cast<double>(batches[k]);
          if (ic_model.in_domain(moved)) pilot = moved;
          continue;
        }
        blocks.push_back(induced_model(model, opt.pvm, cfg.pilot_min_eigenvalue));
        counts.push_back(c);
        used += batches[k];
        std::vector<double> weights;
        for (std::size_t b = 0; b <= k; ++b) weights.push_back(static_cast<double>(batches[b]) / static_cast<double>(used));
        fit = mle(composite_model(blocks, weights), stack(counts), pilot);
        pilot = fit.theta;
        out.boundary = out.boundary || fit.at_boundary;
      }
      if (cfg.estimator == EstimatorKind::LocallyUnbiased)
        out.estimate = RVec::Constant(1, pooled / static_cast<double>(cfg.n_copies - n1));
      if (cfg.estimator == EstimatorKind::MLE) out.estimate = fit.theta.head(1);
      return out;
    };
  }

  const int threads = std::max(1, std::min(cfg.threads, cfg.trials));
  std::vector<std::string> errors(threads);
  auto worker = [&](int t) {
    try {
      for (int k = t; k < cfg.trials; k += threads) outcomes[k] = run_trial(k);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ConvergenceError("simulation trial failed: " + e);

  res.mse = RMat::Zero(di, di);
  res.bias = RVec::Zero(di);
  for (const auto& o : outcomes) {
    RVec err = o.estimate - theta.head(di);
    res.mse += err * err.transpose();
    res.bias += err;
    res.boundary_trials += o.boundary ? 1 : 0;
    res.estimates.push_back(o.estimate);
  }
  res.mse /= cfg.trials;
  res.bias /= cfg.trials;
  res.scaled_mse = n * res.mse;
  res.relative_error = std::abs(res.scaled_mse.trace() - res.target.trace()) / res.target.trace();
  return res;
}

}  // namespace qnuis
