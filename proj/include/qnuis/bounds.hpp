#ifndef QNUIS_BOUNDS_HPP
#define QNUIS_BOUNDS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnuis/model.hpp"
#include "qnuis/partition.hpp"
#include "qnuis/qfisher.hpp"

namespace qnuis {

// Tr[W J^S(I|N)^{-1}]
double sld_cr(const LocalModel& lm, const Partition& partition, const WeightMatrix& w);
// Tr[W Re J^R(I|N)^{-1}] + Tr|W^{1/2} Im J^R(I|N)^{-1} W^{1/2}|
double rld_cr(const LocalModel& lm, const Partition& partition, const WeightMatrix& w);
// (Tr[(W^{-1/2} J^S(I|N) W^{-1/2})^{-1/2}])^2 / (d_H - 1)
double nagaoka_gm(const LocalModel& lm, const Partition& partition, const WeightMatrix& w);

struct HolevoOptions {
  int random_starts = 8;
  std::uint64_t seed = 20240601;
  double eps_start = 1e-3;
  double eps_final = 1e-8;
  double tolerance = tol::opt;
  int threads = 1;
};

struct HolevoResult {
  double value = 0.0;
  double sld_value = 0.0;       // Tr[W Re Z] at the dual-SLD start, a lower bound
  int extension_dim = 0;        // size of the D-invariant complement that was searched
  int starts = 0;
  double start_spread = 0.0;    // max - min of the per-start optima
  std::vector<double> start_values;
  RMat coefficients;            // optimal coefficients on the complement basis
};

// Minimizes Tr[W Re Z(X)] + Tr|W^{1/2} Im Z(X) W^{1/2}| over Hermitian X
// satisfying tr[d_j rho X_k] = G_kj, restricted to the minimal D-invariant
// extension of the SLD tangent space.  G is the K x d Jacobian of the target.
HolevoResult holevo_numeric(const LocalModel& lm, const RMat& target_jacobian, const WeightMatrix& w,
                            const HolevoOptions& options = {});
HolevoResult holevo_numeric(const LocalModel& lm, const Partition& partition, const WeightMatrix& w,
                            const HolevoOptions& options = {});

// Smoothed objective pieces exposed for gradient tests.
struct HolevoProblem {
  CMat q;          // q_ab = tr[B_a rho B_b] over the basis (base operators, complement)
  int k = 0;       // number of estimated quantities
  int m = 0;       // complement dimension
  RMat weight;
  RMat weight_sqrt;

  double objective(const RMat& a, double eps) const;  // eps = 0 gives the exact value
  RMat gradient(const RMat& a, double eps) const;
};
HolevoProblem holevo_problem(const LocalModel& lm, const RMat& target_jacobian, const WeightMatrix& w);

// Operators spanning the minimal D-invariant extension of span{L_i}, split into
// the SLD-orthonormalized tangent part and its orthonormal complement.
struct DInvariantExtension {
  std::vector<CMat> tangent;
  std::vector<CMat> complement;
};
DInvariantExtension d_invariant_extension(const LocalModel& lm, const std::vector<CMat>& generators);

struct QubitClosedForm {
  double value;
  bool rld_branch;
  double branch_indicator;  // Tr|W^1/2 Im R W^1/2| / 2 - Tr[W(S - Re R)], with S, R the inverse Fisher matrices
};
// Two-parameter qubit models only.
QubitClosedForm holevo_qubit_closed(const LocalModel& lm, const WeightMatrix& w);

struct FunctionSpec {
  int k = 1;
  std::function<RVec(const RVec&)> value;
  std::function<RMat(const RVec&)> jacobian;  // K x d
};

enum class BoundKind { SLD, RLD, Holevo };
BoundKind parse_bound_kind(const std::string& name);

double function_bound(const LocalModel& lm, const RMat& target_jacobian, const WeightMatrix& w, BoundKind kind,
                      const HolevoOptions& options = {});
double function_bound(const StateModel& model, const RVec& theta, const FunctionSpec& g, const WeightMatrix& w,
                      BoundKind kind, const HolevoOptions& options = {});

// Tr[W (B J^{-1} B^T + b b^T)] where B = I + d b / d theta for an estimator with bias b.
double generalized_cr(const LocalModel& lm, const RMat& bias_matrix, const RVec& bias, const WeightMatrix& w);

struct LossReport {
  double with_nuisance;
  double nuisance_known;
  double loss;
};
// Bound for the interest block with nuisance parameters unknown minus the same
// bound for the submodel in which the nuisance parameters are fixed.
LossReport information_loss(const StateModel& model, const RVec& theta, const Partition& partition,
                            const WeightMatrix& w, BoundKind kind, const HolevoOptions& options = {});

struct BoundReport {
  RVec point;
  int d_interest = 0;
  int d_total = 0;
  RMat weight;
  std::map<std::string, double> values;
  std::map<std::string, double> diagnostics;
  std::map<std::string, bool> checks;
};

std::vector<std::string> bound_names();
BoundReport compute_bounds(const StateModel& model, const RVec& theta, const Partition& partition,
                           const WeightMatrix& w, const std::vector<std::string>& names,
                           const HolevoOptions& options = {});

}  // namespace qnuis

#endif
