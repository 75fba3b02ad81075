#ifndef QNUIS_MODEL_HPP
#define QNUIS_MODEL_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qnuis/linalg.hpp"
#include "qnuis/tolerances.hpp"

namespace qnuis {

// Open interval (lo, hi).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
};

// A smooth family of full-rank density matrices on C^{dim_hilbert} indexed by
// a point in an open subset of R^{dim_param}.
class StateModel {
 public:
  using StateFn = std::function<CMat(const RVec&)>;
  using DerivFn = std::function<std::vector<CMat>(const RVec&)>;
  using Constraint = std::function<bool(const RVec&)>;

  StateModel(int dim_hilbert, int dim_param, StateFn state, DerivFn derivatives,
             std::vector<Interval> domain, std::vector<std::string> labels = {},
             Constraint constraint = {}, double fd_step = tol::fd_step);

  int dim_hilbert() const { return dim_hilbert_; }
  int dim_param() const { return dim_param_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double fd_step() const { return fd_step_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(deriv_); }

  bool in_domain(const RVec& theta) const;
  void check_domain(const RVec& theta) const;

  // Validated state: Hermitian, unit trace, smallest eigenvalue above the
  // positivity floor.
  CMat evaluate(const RVec& theta) const;

  // Validated partial derivatives, Hermitian-symmetrized, with the regularity
  // check on their Gram matrix.
  std::vector<CMat> derivatives(const RVec& theta) const;

  // Central finite differences regardless of whether analytic derivatives exist.
  std::vector<CMat> finite_difference_derivatives(const RVec& theta) const;

  // Raw state without validation, used by finite differences near the boundary.
  CMat raw_state(const RVec& theta) const { return state_(theta); }

 private:
  int dim_hilbert_;
  int dim_param_;
  StateFn state_;
  DerivFn deriv_;
  std::vector<Interval> domain_;
  std::vector<std::string> labels_;
  Constraint constraint_;
  double fd_step_;
};

// theta(xi) with jacobian T(alpha, i) = d theta_i / d xi_alpha.
struct Reparametrization {
  std::function<RVec(const RVec&)> to_base;
  std::function<RMat(const RVec&)> jacobian;
};

StateModel reparametrize(const StateModel& base, Reparametrization map, std::vector<Interval> domain,
                         std::vector<std::string> labels = {});

// Submodel over the first `keep` parameters with the remaining ones fixed at
// their values in `theta`.
StateModel fix_trailing_parameters(const StateModel& base, const RVec& theta, int keep);

}  // namespace qnuis

#endif
