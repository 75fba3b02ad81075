#ifndef QNUIS_QFISHER_HPP
#define QNUIS_QFISHER_HPP

#include <vector>

#include "qnuis/linalg.hpp"
#include "qnuis/model.hpp"

namespace qnuis {

// State and first derivatives at a single point.  Every local quantity is a
// function of this data alone.
class LocalModel {
 public:
  LocalModel(CMat rho, std::vector<CMat> derivatives, RVec point = RVec());

  int dim_hilbert() const { return static_cast<int>(rho_.rows()); }
  int dim_param() const { return static_cast<int>(drho_.size()); }
  const CMat& rho() const { return rho_; }
  const std::vector<CMat>& derivatives() const { return drho_; }
  const RVec& point() const { return point_; }
  const RVec& eigenvalues() const { return eig_.values; }
  const CMat& eigenvectors() const { return eig_.vectors; }

  // Operator expressed in / back from the eigenbasis of rho.
  CMat to_eigenbasis(const CMat& x) const { return eig_.vectors.adjoint() * x * eig_.vectors; }
  CMat from_eigenbasis(const CMat& x) const { return eig_.vectors * x * eig_.vectors.adjoint(); }

 private:
  CMat rho_;
  std::vector<CMat> drho_;
  RVec point_;
  HermitianEigen eig_;
};

LocalModel local_model(const StateModel& model, const RVec& theta);

enum class LogDerivativeKind { SLD, RLD };
enum class FisherKind { SLD, RLD, Classical };

struct LogDerivativeSet {
  LogDerivativeKind kind;
  std::vector<CMat> operators;
  RVec point;
};

// entries is real symmetric for SLD and classical kinds and Hermitian for RLD.
struct QFIM {
  FisherKind kind;
  CMat entries;
  RVec point;

  RMat real() const { return entries.real(); }
  RMat imag() const { return entries.imag(); }
  int dim() const { return static_cast<int>(entries.rows()); }
};

LogDerivativeSet sld(const LocalModel& lm);
LogDerivativeSet rld(const LocalModel& lm);
LogDerivativeSet sld(const StateModel& model, const RVec& theta);
LogDerivativeSet rld(const StateModel& model, const RVec& theta);

QFIM fisher_matrix(const LogDerivativeSet& ops, const CMat& rho);
QFIM sld_fisher(const LocalModel& lm);
QFIM rld_fisher(const LocalModel& lm);

// Dual operators L^i = sum_j (J^{-1})_{ji} L_j.
std::vector<CMat> dual_operators(const LogDerivativeSet& ops, const QFIM& fisher);

// <X, Y>_S = tr[rho (Y X^dag + X^dag Y)] / 2 and <X, Y>_R = tr[rho Y X^dag].
cplx sld_inner(const CMat& rho, const CMat& x, const CMat& y);
cplx rld_inner(const CMat& rho, const CMat& x, const CMat& y);

// The operator D with rho X - X rho = i (rho D + D rho).
CMat commutation_operator(const LocalModel& lm, const CMat& x);
CMat commutation_operator(const CMat& rho, const CMat& x);

// Z_ij = tr[X_i rho X_j].
CMat z_matrix(const std::vector<CMat>& ops, const CMat& rho);

}  // namespace qnuis

#endif
