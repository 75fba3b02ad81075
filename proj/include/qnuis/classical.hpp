#ifndef QNUIS_CLASSICAL_HPP
#define QNUIS_CLASSICAL_HPP

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnuis/model.hpp"
#include "qnuis/partition.hpp"

namespace qnuis {

// Finite-outcome family p_theta(x), x = 0..n_outcomes-1.
class ClassicalModel {
 public:
  using ProbFn = std::function<RVec(const RVec&)>;
  using DerivFn = std::function<RMat(const RVec&)>;  // n_outcomes x d
  using Constraint = std::function<bool(const RVec&)>;

  ClassicalModel(int n_outcomes, int dim_param, ProbFn prob, DerivFn deriv = {}, std::vector<Interval> domain = {},
                 std::vector<std::string> outcome_labels = {}, Constraint constraint = {},
                 double fd_step = tol::fd_step);

  int n_outcomes() const { return n_outcomes_; }
  int dim_param() const { return dim_param_; }
  const std::vector<std::string>& outcome_labels() const { return labels_; }
  const std::vector<Interval>& domain() const { return domain_; }
  bool in_domain(const RVec& theta) const;
  void check_domain(const RVec& theta) const;

  // Validated probabilities (non-negative, summing to one).
  RVec probabilities(const RVec& theta) const;
  RMat derivatives(const RVec& theta) const;

 private:
  int n_outcomes_;
  int dim_param_;
  ProbFn prob_;
  DerivFn deriv_;
  std::vector<Interval> domain_;
  std::vector<std::string> labels_;
  Constraint constraint_;
  double fd_step_;
};

ClassicalModel classical_dice();

// Score u_i(x) = d_i log p(x), rows indexed by outcome; outcomes below the
// probability floor get zero rows.
RMat score(const ClassicalModel& model, const RVec& theta);
RMat fisher_matrix(const ClassicalModel& model, const RVec& theta);

// u_I(x) - M u_N(x).  M defaults to the efficient choice J_IN J_NN^+.
RMat effective_score(const ClassicalModel& model, const RVec& theta, const Partition& partition,
                     const std::optional<RMat>& m = std::nullopt);
RMat efficient_coupling(const RMat& fisher, const Partition& partition);

struct MleResult {
  RVec theta;
  bool converged = false;
  bool at_boundary = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
};

// Fisher scoring with backtracking, kept inside the domain.  When the domain
// clips a step, steps holding one coordinate fixed are tried as well.
MleResult mle(const ClassicalModel& model, const RVec& counts, const std::optional<RVec>& start = std::nullopt);

struct ClassicalBounds {
  double nuisance_known;    // Tr[W J_II^{-1}]
  double nuisance_unknown;  // Tr[W J(I|N)^{-1}]
  double loss;
};
ClassicalBounds cr_bounds(const ClassicalModel& model, const RVec& theta, const Partition& partition,
                          const WeightMatrix& w);

// Rows of "label,count"; an optional header row whose count field is not a number is skipped.
RVec read_counts_csv(std::istream& in, const std::vector<std::string>& labels);

}  // namespace qnuis

#endif
