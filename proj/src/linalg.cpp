#include "qnuis/linalg.hpp"

#include <cmath>
#include <string>

#include "qnuis/errors.hpp"
#include "qnuis/tolerances.hpp"

namespace qnuis {

HermitianEigen eig_hermitian(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw ConsistencyError("hermitian eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double max_abs(const CMat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const CMat& a) { return max_abs(a - a.adjoint()); }

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

double trace_norm(const RMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMat> svd(a);
  return svd.singularValues().sum();
}

double trace_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues().sum();
}

RMat sqrt_psd(const RMat& a) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (a + a.transpose()));
  RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

RMat inv_sqrt_pd(const RMat& a) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (a + a.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0) throw SingularQFIMError("matrix is not positive definite");
  RVec s = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

double condition_number(const RMat& sym) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (sym + sym.transpose()));
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return INFINITY;
  return hi / lo;
}

namespace {

template <class M>
M inverse_pd_impl(const M& a, const char* what) {
  M h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<M> es(h);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > tol::max_condition) {
    throw SingularQFIMError(std::string(what) + " is singular or ill-conditioned (min eigenvalue " +
                            std::to_string(lo) + ", max " + std::to_string(hi) + ")");
  }
  RVec inv = es.eigenvalues().cwiseInverse();
  M out = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

RMat inverse_pd(const RMat& a, const char* what) { return inverse_pd_impl(a, what); }
CMat inverse_pd(const CMat& a, const char* what) { return inverse_pd_impl(a, what); }

RMat pseudo_inverse(const RMat& a, double cutoff) {
  if (a.size() == 0) return RMat(a.cols(), a.rows());
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  RVec inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cutoff * std::max(1.0, smax) ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

RVec vectorize(const CMat& a) {
  RVec v(2 * a.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      v(k) = a(i, j).real();
      v(k + a.size()) = a(i, j).imag();
      ++k;
    }
  return v;
}

}  // namespace qnuis
