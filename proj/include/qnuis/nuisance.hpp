#ifndef QNUIS_NUISANCE_HPP
#define QNUIS_NUISANCE_HPP

#include <vector>

#include "qnuis/model.hpp"
#include "qnuis/partition.hpp"
#include "qnuis/qfisher.hpp"

namespace qnuis {

struct PartialFisher {
  FisherKind kind;
  CMat entries;  // J(I|N) = J_II - J_IN J_NN^{-1} J_NI
  RVec point;
  Partition partition;

  RMat real() const { return entries.real(); }
};

PartialFisher partial_fisher(const QFIM& fisher, const Partition& partition);

// L_i minus its projection onto the nuisance log-derivatives, for i in the
// interest block, under the inner product that matches the operator kind.
std::vector<CMat> effective_log_derivatives(const LogDerivativeSet& ops, const QFIM& fisher, const Partition& partition);
std::vector<CMat> effective_slds(const LocalModel& lm, const Partition& partition);
std::vector<CMat> effective_rlds(const LocalModel& lm, const Partition& partition);

// xi_I = theta_I, xi_N = theta_N + J_NN(theta0)^{-1} J_NI(theta0) (theta_I - theta0_I).
struct OrthoTransform {
  RMat jacobian;  // T(alpha, i) = d theta_i / d xi_alpha
  RVec reference;
  Partition partition;
  RMat coupling;  // J_NN^{-1} J_NI at the reference point

  RVec to_xi(const RVec& theta) const;
  RVec to_theta(const RVec& xi) const;
  // J_xi = T J_theta T^T
  RMat transform(const RMat& j_theta) const { return jacobian * j_theta * jacobian.transpose(); }
};

OrthoTransform local_orthogonalize(const QFIM& fisher_at_reference, const Partition& partition);
OrthoTransform local_orthogonalize(const StateModel& model, const RVec& reference, const Partition& partition);
StateModel orthogonalized_model(const StateModel& model, const OrthoTransform& transform);

struct TrajectoryPoint {
  double xi1;
  RVec theta;
  RVec tangent;              // d theta / d xi1 along the curve
  double orthogonality;      // max_j |(J t)_j| over nuisance j
  double inverse_fisher_11;  // (J^{-1})_{11} in the original coordinates
  double tangent_fisher;     // t^T J t, the new (1,1) entry
};

struct OdeOptions {
  double max_step = 0.0;  // 0 means one RK4 step per grid interval
  double tolerance = tol::ode;
};

// Integrates d theta_N / d xi1 = -J_NN^{-1} J_N1 for a single interest
// parameter with theta_1 = xi1, starting at `start` and reporting at each grid
// value of xi1.
std::vector<TrajectoryPoint> global_orthogonalize_ode(const StateModel& model, const RVec& start,
                                                      const std::vector<double>& grid, const OdeOptions& options = {});

}  // namespace qnuis

#endif
