#ifndef QNUIS_LINALG_HPP
#define QNUIS_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qnuis {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct HermitianEigen {
  RVec values;   // ascending
  CMat vectors;  // columns
};

HermitianEigen eig_hermitian(const CMat& a);

double max_abs(const CMat& a);
double hermiticity_defect(const CMat& a);
CMat hermitian_part(const CMat& a);
CMat commutator(const CMat& a, const CMat& b);

// Sum of singular values.
double trace_norm(const RMat& a);
double trace_norm(const CMat& a);

RMat sqrt_psd(const RMat& a);
RMat inv_sqrt_pd(const RMat& a);
double condition_number(const RMat& sym);

// Inverse of a symmetric (or Hermitian) positive definite matrix.  Throws
// SingularQFIMError when the spectrum is non-positive or the condition number
// exceeds tol::max_condition.
RMat inverse_pd(const RMat& a, const char* what = "matrix");
CMat inverse_pd(const CMat& a, const char* what = "matrix");

RMat pseudo_inverse(const RMat& a, double cutoff);

// Row-major real vectorization of a Hermitian operator (real parts then imaginary parts).
RVec vectorize(const CMat& a);

}  // namespace qnuis

#endif
