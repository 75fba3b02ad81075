#include "qnuis/classical.hpp"

#include <cmath>
#include <sstream>

#include "qnuis/errors.hpp"
#include "qnuis/output.hpp"

namespace qnuis {

ClassicalModel::ClassicalModel(int n_outcomes, int dim_param, ProbFn prob, DerivFn deriv, std::vector<Interval> domain,
                               std::vector<std::string> outcome_labels, Constraint constraint, double fd_step)
    : n_outcomes_(n_outcomes),
      dim_param_(dim_param),
      prob_(std::move(prob)),
      deriv_(std::move(deriv)),
      domain_(std::move(domain)),
      labels_(std::move(outcome_labels)),
      constraint_(std::move(constraint)),
      fd_step_(fd_step) {
  if (n_outcomes_ < 2) throw ModelShapeError("a classical model needs at least two outcomes");
  if (dim_param_ < 1) throw ModelShapeError("parameter dimension must be positive");
  if (!prob_) throw ModelShapeError("probability function is empty");
  if (domain_.empty()) domain_.assign(dim_param_, Interval{});
  if (static_cast<int>(domain_.size()) != dim_param_) throw ModelShapeError("domain size does not match parameter dimension");
  if (labels_.empty())
    for (int x = 0; x < n_outcomes_; ++x) labels_.push_back(std::to_string(x));
  if (static_cast<int>(labels_.size()) != n_outcomes_) throw ModelShapeError("label count does not match outcome count");
}

bool ClassicalModel::in_domain(const RVec& theta) const {
  if (theta.size() != dim_param_) return false;
  for (int i = 0; i < dim_param_; ++i)
    if (!std::isfinite(theta(i)) || !domain_[i].contains(theta(i))) return false;
  return !constraint_ || constraint_(theta);
}

void ClassicalModel::check_domain(const RVec& theta) const {
  if (theta.size() != dim_param_) throw DimensionError("point dimension does not match the classical model");
  if (!in_domain(theta)) throw DomainError("point is outside the classical model domain");
}

RVec ClassicalModel::probabilities(const RVec& theta) const {
  check_domain(theta);
  RVec p = prob_(theta);
  if (p.size() != n_outcomes_) throw ModelShapeError("probability vector has the wrong length");
  if (p.minCoeff() < -1e-12) throw ModelError("negative outcome probability");
  if (std::abs(p.sum() - 1.0) > 1e-10) throw ModelError("outcome probabilities do not sum to one");
  return p.cwiseMax(0.0);
}

RMat ClassicalModel::derivatives(const RVec& theta) const {
  check_domain(theta);
  if (deriv_) {
    RMat d = deriv_(theta);
    if (d.rows() != n_outcomes_ || d.cols() != dim_param_) throw ModelShapeError("probability derivatives have the wrong shape");
    return d;
  }
  RMat d(n_outcomes_, dim_param_);
  for (int i = 0; i < dim_param_; ++i) {
    double h = fd_step_ * std::max(1.0, std::abs(theta(i)));
    RVec a = theta, b = theta;
    a(i) += h;
    b(i) -= h;
    if (!in_domain(a) || !in_domain(b)) throw StepError("finite-difference step leaves the classical model domain");
    d.col(i) = (prob_(a) - prob_(b)) / (2.0 * h);
  }
  return d;
}

ClassicalModel classical_dice() {
  auto prob = [](const RVec& t) {
    RVec p(3);
    p << t(0), t(1), 1.0 - t(0) - t(1);
    return p;
  };
  auto deriv = [](const RVec&) {
    RMat d(3, 2);
    d << 1, 0, 0, 1, -1, -1;
    return d;
  };
  auto inside = [](const RVec& t) { return t(0) + t(1) < 1.0; };
  return ClassicalModel(3, 2, prob, deriv, {{0, 1}, {0, 1}}, {"1", "2", "3"}, inside);
}

RMat score(const ClassicalModel& model, const RVec& theta) {
  RVec p = model.probabilities(theta);
  RMat d = model.derivatives(theta);
  RMat u = RMat::Zero(p.size(), model.dim_param());
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p(x) > tol::prob_floor) {
      u.row(x) = d.row(x) / p(x);
    } else if (d.row(x).cwiseAbs().maxCoeff() > 1e-8) {
      throw SingularOutcomeError("outcome " + model.outcome_labels()[x] + " has vanishing probability but non-zero derivative");
    }
  }
  return u;
}

RMat fisher_matrix(const ClassicalModel& model, const RVec& theta) {
  RVec p = model.probabilities(theta);
  RMat u = score(model, theta);
  RMat j = u.transpose() * p.asDiagonal() * u;
  return 0.5 * (j + j.transpose());
}

RMat efficient_coupling(const RMat& fisher, const Partition& partition) {
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  if (dn == 0) return RMat::Zero(di, 0);
  return fisher.topRightCorner(di, dn) * pseudo_inverse(RMat(fisher.bottomRightCorner(dn, dn)), tol::pinv_cutoff);
}

RMat effective_score(const ClassicalModel& model, const RVec& theta, const Partition& partition,
                     const std::optional<RMat>& m) {
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the classical model");
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  RMat u = score(model, theta);
  RMat coupling = m ? *m : efficient_coupling(fisher_matrix(model, theta), partition);
  if (coupling.rows() != di || coupling.cols() != dn) throw DimensionError("coupling matrix has the wrong shape");
  RMat eff = u.leftCols(di);
  if (dn > 0) eff -= u.rightCols(dn) * coupling.transpose();
  return eff;
}

namespace {

double log_likelihood(const RVec& p, const RVec& counts) {
  double ll = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (counts(x) <= 0.0) continue;
    if (p(x) <= 0.0) return -INFINITY;
    ll += counts(x) * std::log(p(x));
  }
  return ll;
}

// Domain centre, pulled toward the lower corner until the point is admissible.
RVec default_start(const ClassicalModel& model) {
  const auto& dom = model.domain();
  RVec s(model.dim_param());
  for (double f = 0.5; f > 1e-6; f *= 0.5) {
    for (int i = 0; i < model.dim_param(); ++i) {
      const Interval& in = dom[i];
      if (std::isfinite(in.lo) && std::isfinite(in.hi)) s(i) = in.lo + f * (in.hi - in.lo);
      else if (std::isfinite(in.lo)) s(i) = in.lo + 2.0 * f;
      else if (std::isfinite(in.hi)) s(i) = in.hi - 2.0 * f;
      else s(i) = 0.0;
    }
    if (model.in_domain(s)) return s;
  }
  throw ConfigError("no admissible default MLE start point; supply one");
}

}  // namespace

MleResult mle(const ClassicalModel& model, const RVec& counts, const std::optional<RVec>& start) {
  if (counts.size() != model.n_outcomes()) throw DimensionError("count vector length does not match outcome count");
  if (counts.minCoeff() < 0.0) throw ConfigError("counts must be non-negative");
  const double total = counts.sum();
  if (!(total > 0.0)) throw ConfigError("counts are all zero");

  RVec theta = start ? *start : default_start(model);
  if (!model.in_domain(theta)) throw ConfigError("MLE start point is outside the domain");

  MleResult res;
  RVec p = model.probabilities(theta);
  double ll = log_likelihood(p, counts);
  if (!std::isfinite(ll)) throw ConvergenceError("log-likelihood is not finite at the start point");
  const int dim = model.dim_param();
  bool truncated = false;
  // Backtracking along `step`; returns whether the candidate was clipped by the domain.
  auto search = [&](const RVec& from, const RVec& step, RVec& to, RVec& pto, double& llto) {
    bool clipped = false;
    double a = 1.0;
    for (int ls = 0; ls < 60; ++ls, a *= 0.5) {
      RVec cand = from + a * step;
      if (!model.in_domain(cand)) {
        clipped = true;
        continue;
      }
      RVec pc = model.probabilities(cand);
      double llc = log_likelihood(pc, counts);
      if (llc >= ll - 1e-14 * std::abs(ll)) {
        to = cand;
        pto = pc;
        llto = llc;
        return clipped;
      }
    }
    to = from;
    pto = p;
    llto = ll;
    return true;
  };
  for (int it = 0; it < tol::mle_max_iterations; ++it) {
    res.iterations = it;
    RMat d = model.derivatives(theta);
    RVec grad = RVec::Zero(dim);
    RMat info = RMat::Zero(dim, dim);
    for (Eigen::Index x = 0; x < p.size(); ++x) {
      if (p(x) <= tol::prob_floor) continue;
      grad += counts(x) * d.row(x).transpose() / p(x);
      info += total * d.row(x).transpose() * d.row(x) / p(x);
    }
    res.gradient_norm = grad.lpNorm<Eigen::Infinity>() / total;
    if (res.gradient_norm < tol::mle_gradient) {
      res.converged = true;
      break;
    }
    RVec best, pbest;
    double llbest;
    truncated = search(theta, pseudo_inverse(info, tol::pinv_cutoff) * grad, best, pbest, llbest);
    bool stationary_face = false;
    if (truncated && dim > 1) {
      // Hold one coordinate at a time and take the Newton step in the others.
      for (int j = 0; j < dim; ++j) {
        std::vector<int> free;
        for (int k = 0; k < dim; ++k)
          if (k != j) free.push_back(k);
        const int m = static_cast<int>(free.size());
        RMat sub(m, m);
        RVec g(m);
        for (int r = 0; r < m; ++r) {
          g(r) = grad(free[r]);
          for (int c = 0; c < m; ++c) sub(r, c) = info(free[r], free[c]);
        }
        if (g.lpNorm<Eigen::Infinity>() / total < tol::mle_gradient) stationary_face = true;
        RVec red = pseudo_inverse(sub, tol::pinv_cutoff) * g;
        RVec step = RVec::Zero(dim);
        for (int r = 0; r < m; ++r) step(free[r]) = red(r);
        RVec cand, pc;
        double llc;
        search(theta, step, cand, pc, llc);
        if (llc > llbest) {
          best = cand;
          pbest = pc;
          llbest = llc;
        }
      }
    }
    const bool moved = llbest > ll || (best - theta).norm() > 0.0;
    theta = best;
    p = pbest;
    ll = llbest;
    if (stationary_face || !moved) break;
  }
  res.theta = theta;
  res.log_likelihood = ll;
  if (!res.converged) {
    res.at_boundary = truncated || p.minCoeff() < 1e-6;
    if (!res.at_boundary) throw ConvergenceError("MLE did not converge");
  }
  return res;
}

ClassicalBounds cr_bounds(const ClassicalModel& model, const RVec& theta, const Partition& partition,
                          const WeightMatrix& w) {
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the classical model");
  if (w.dim() != partition.d_interest()) throw DimensionError("weight matrix does not match the interest block");
  RMat j = fisher_matrix(model, theta);
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  RMat jii = j.topLeftCorner(di, di);
  RMat part = jii;
  if (dn > 0)
    part -= j.topRightCorner(di, dn) * inverse_pd(RMat(j.bottomRightCorner(dn, dn)), "nuisance Fisher block") *
            j.bottomLeftCorner(dn, di);
  ClassicalBounds b{};
  b.nuisance_known = (w.entries() * inverse_pd(jii, "Fisher block")).trace();
  b.nuisance_unknown = (w.entries() * inverse_pd(part, "partial Fisher matrix")).trace();
  b.loss = std::max(0.0, b.nuisance_unknown - b.nuisance_known);
  return b;
}

RVec read_counts_csv(std::istream& in, const std::vector<std::string>& labels) {
  RVec counts = RVec::Zero(static_cast<Eigen::Index>(labels.size()));
  std::vector<std::vector<std::string>> rows = parse_csv(in);
  bool first = true;
  for (const auto& row : rows) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw ConfigError("count rows must have exactly two fields");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(row[1], &used);
      if (used != row[1].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError("count '" + row[1] + "' is not a number");
    }
    first = false;
    if (value < 0.0 || std::floor(value) != value) throw ConfigError("counts must be non-negative integers");
    bool found = false;
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == row[0]) {
        counts(k) += value;
        found = true;
      }
    if (!found) throw ConfigError("unknown outcome label '" + row[0] + "'");
  }
  return counts;
}

}  // namespace qnuis
