#include "qnuis/qfisher.hpp"

#include <cmath>

#include "qnuis/errors.hpp"
#include "qnuis/tolerances.hpp"

namespace qnuis {

LocalModel::LocalModel(CMat rho, std::vector<CMat> derivatives, RVec point)
    : rho_(std::move(rho)), drho_(std::move(derivatives)), point_(std::move(point)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 2) throw DimensionError("state must be a square matrix of size >= 2");
  if (hermiticity_defect(rho_) > tol::hermiticity * std::max(1.0, max_abs(rho_)))
    throw ModelError("state is not Hermitian");
  rho_ = hermitian_part(rho_);
  if (std::abs(rho_.trace() - cplx(1.0)) > 1e-10) throw ModelError("state trace differs from one");
  if (drho_.empty()) throw DimensionError("at least one derivative is required");
  for (auto& d : drho_) {
    if (d.rows() != rho_.rows() || d.cols() != rho_.cols()) throw DimensionError("derivative shape does not match state");
    d = hermitian_part(d);
  }
  eig_ = eig_hermitian(rho_);
  if (eig_.values.minCoeff() < tol::positivity)
    throw SingularStateError("state has an eigenvalue below the positivity floor");
}

LocalModel local_model(const StateModel& model, const RVec& theta) {
  return LocalModel(model.evaluate(theta), model.derivatives(theta), theta);
}

LogDerivativeSet sld(const LocalModel& lm) {
  const RVec& p = lm.eigenvalues();
  const int n = lm.dim_hilbert();
  LogDerivativeSet out{LogDerivativeKind::SLD, {}, lm.point()};
  for (const auto& d : lm.derivatives()) {
    CMat de = lm.to_eigenbasis(d);
    CMat l(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) l(a, b) = 2.0 * de(a, b) / (p(a) + p(b));
    out.operators.push_back(hermitian_part(lm.from_eigenbasis(l)));
  }
  return out;
}

LogDerivativeSet rld(const LocalModel& lm) {
  const RVec& p = lm.eigenvalues();
  CMat rho_inv = lm.eigenvectors() * p.cwiseInverse().asDiagonal() * lm.eigenvectors().adjoint();
  LogDerivativeSet out{LogDerivativeKind::RLD, {}, lm.point()};
  for (const auto& d : lm.derivatives()) out.operators.push_back(rho_inv * d);
  return out;
}

LogDerivativeSet sld(const StateModel& model, const RVec& theta) { return sld(local_model(model, theta)); }
LogDerivativeSet rld(const StateModel& model, const RVec& theta) { return rld(local_model(model, theta)); }

QFIM fisher_matrix(const LogDerivativeSet& ops, const CMat& rho) {
  const int d = static_cast<int>(ops.operators.size());
  CMat j(d, d);
  if (ops.kind == LogDerivativeKind::SLD) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) j(a, b) = sld_inner(rho, ops.operators[a], ops.operators[b]).real();
    RMat r = j.real();
    j = (0.5 * (r + r.transpose())).cast<cplx>();
    return {FisherKind::SLD, j, ops.point};
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) j(a, b) = rld_inner(rho, ops.operators[a], ops.operators[b]);
  j = hermitian_part(j);
  return {FisherKind::RLD, j, ops.point};
}

QFIM sld_fisher(const LocalModel& lm) { return fisher_matrix(sld(lm), lm.rho()); }
QFIM rld_fisher(const LocalModel& lm) { return fisher_matrix(rld(lm), lm.rho()); }

std::vector<CMat> dual_operators(const LogDerivativeSet& ops, const QFIM& fisher) {
  const int d = static_cast<int>(ops.operators.size());
  if (fisher.dim() != d) throw DimensionError("Fisher matrix does not match operator count");
  CMat inv = inverse_pd(fisher.entries, "Fisher matrix");
  std::vector<CMat> out;
  for (int i = 0; i < d; ++i) {
    CMat acc = CMat::Zero(ops.operators[0].rows(), ops.operators[0].cols());
    for (int j = 0; j < d; ++j) acc += inv(j, i) * ops.operators[j];
    out.push_back(ops.kind == LogDerivativeKind::SLD ? hermitian_part(acc) : acc);
  }
  return out;
}

cplx sld_inner(const CMat& rho, const CMat& x, const CMat& y) {
  CMat xd = x.adjoint();
  return 0.5 * (rho * (y * xd + xd * y)).trace();
}

cplx rld_inner(const CMat& rho, const CMat& x, const CMat& y) { return (rho * y * x.adjoint()).trace(); }

CMat commutation_operator(const LocalModel& lm, const CMat& x) {
  const RVec& p = lm.eigenvalues();
  const int n = lm.dim_hilbert();
  CMat xe = lm.to_eigenbasis(x);
  CMat d(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) d(a, b) = cplx(0.0, -1.0) * ((p(a) - p(b)) / (p(a) + p(b))) * xe(a, b);
  return lm.from_eigenbasis(d);
}

CMat commutation_operator(const CMat& rho, const CMat& x) {
  std::vector<CMat> none{CMat::Zero(rho.rows(), rho.cols())};
  return commutation_operator(LocalModel(rho, none), x);
}

CMat z_matrix(const std::vector<CMat>& ops, const CMat& rho) {
  const int k = static_cast<int>(ops.size());
  CMat z(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) z(i, j) = (ops[i] * rho * ops[j]).trace();
  return z;
}

}  // namespace qnuis
