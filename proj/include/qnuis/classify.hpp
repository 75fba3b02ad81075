#ifndef QNUIS_CLASSIFY_HPP
#define QNUIS_CLASSIFY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnuis/model.hpp"
#include "qnuis/partition.hpp"
#include "qnuis/qfisher.hpp"

namespace qnuis {

struct ClassFlag {
  bool value = false;
  double residual = 0.0;  // relative residual that was compared against the tolerance
};

// Full model: the span of the SLDs is closed under the commutation operator,
// cross-checked against (J^R)^{-1} = Z of the SLD duals.  With nuisance
// parameters: the SLD and RLD dual operators of every interest parameter
// coincide.
ClassFlag is_d_invariant(const LocalModel& lm, const std::optional<Partition>& partition = std::nullopt,
                         double tolerance = tol::classification);

// Residual of the commutation operator applied to the effective SLDs, projected
// off their own span (reported as a diagnostic).
double effective_span_d_residual(const LocalModel& lm, const Partition& partition);

// tr rho [L~_i, L~_j] = 0 for all interest pairs, cross-checked against Im Z = 0.
ClassFlag is_asymptotically_classical(const LocalModel& lm, const std::optional<Partition>& partition = std::nullopt,
                                      double tolerance = tol::classification);

// Effective SLDs commute across every pair of grid points.
ClassFlag is_quasi_classical(const StateModel& model, const std::vector<RVec>& grid,
                             const std::optional<Partition>& partition = std::nullopt,
                             double tolerance = tol::classification);

// J^S = J^R, cross-checked against [rho, d_i rho] = 0.
ClassFlag is_classical(const LocalModel& lm, double tolerance = tol::classification);

struct ClassificationReport {
  std::map<std::string, ClassFlag> flags;
  std::map<std::string, std::string> scope;  // "point" or "grid"
  std::map<std::string, double> diagnostics;
  RVec point;
  int d_interest = 0;
  int d_total = 0;
  std::vector<RVec> grid;
};

// Pointwise flags at theta plus the quasi-classical flag on a small grid
// around theta (or the supplied grid).
ClassificationReport classify(const StateModel& model, const RVec& theta, const std::optional<Partition>& partition,
                              const std::vector<RVec>& grid = {});

std::vector<RVec> neighbourhood_grid(const StateModel& model, const RVec& theta, double radius = 0.05);

}  // namespace qnuis

#endif
