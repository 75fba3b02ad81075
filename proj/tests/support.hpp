#ifndef QNUIS_TEST_SUPPORT_HPP
#define QNUIS_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "qnuis/linalg.hpp"
#include "qnuis/model.hpp"
#include "qnuis/zoo.hpp"

namespace testing {

using namespace qnuis;

inline CMat random_density(std::mt19937_64& rng, int d, double min_eig = 0.05) {
  std::normal_distribution<double> nd;
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (1.0 - d * min_eig) * rho + min_eig * CMat::Identity(d, d);
  return 0.5 * (rho + rho.adjoint());
}

inline CMat random_hermitian(std::mt19937_64& rng, int d, bool traceless = false) {
  std::normal_distribution<double> nd;
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
  CMat h = 0.5 * (g + g.adjoint());
  if (traceless) h -= h.trace() / static_cast<double>(d) * CMat::Identity(d, d);
  return h;
}

// Column-major vec of the solution of (L rho + rho L) / 2 = drho via the
// Kronecker form (I (x) rho + rho^T (x) I) / 2.
inline CMat lyapunov_sld(const CMat& rho, const CMat& drho) {
  const int d = static_cast<int>(rho.rows());
  CMat k = CMat::Zero(d * d, d * d);
  CMat id = CMat::Identity(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          k(a * d + c, b * d + e) = 0.5 * (id(a, b) * rho(c, e) + rho(b, a) * id(c, e));
  CVec rhs = Eigen::Map<const CVec>(drho.data(), d * d);
  CVec x = k.fullPivLu().solve(rhs);
  return Eigen::Map<CMat>(x.data(), d, d);
}

// Coordinates of a density matrix in the orthonormal traceless basis.
inline RVec bloch_coordinates(const CMat& rho) {
  const int d = static_cast<int>(rho.rows());
  std::vector<CMat> basis = orthonormal_traceless_basis(d);
  RVec x(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) x(i) = (rho * basis[i]).trace().real();
  return x;
}

struct Instance {
  StateModel model;
  RVec point;
};

// A k-parameter affine slice theta0 + A xi of the full qudit model through a
// random full-rank state.  Generic: neither D-invariant nor classical.
inline Instance random_slice(std::mt19937_64& rng, int d, int k) {
  StateModel base = zoo_build("qudit-observable", {{"d_H", d}});
  const int n = base.dim_param();
  RVec theta0 = bloch_coordinates(random_density(rng, d, 0.1));
  std::normal_distribution<double> nd;
  RMat a(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = nd(rng);
  Reparametrization map{[theta0, a](const RVec& xi) { return RVec(theta0 + a * xi); },
                        [a](const RVec&) { return RMat(a.transpose()); }};
  StateModel m = reparametrize(base, map, std::vector<Interval>(k, Interval{-10.0, 10.0}));
  return {m, RVec::Zero(k)};
}

// Random admissible point, at least `margin` away from pure states.
inline RVec random_point(const StateModel& m, std::mt19937_64& rng, double margin = 0.02) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    RVec x(m.dim_param());
    for (int i = 0; i < m.dim_param(); ++i) {
      const Interval& in = m.domain()[i];
      double lo = std::isfinite(in.lo) ? in.lo : -3.0;
      double hi = std::isfinite(in.hi) ? in.hi : lo + 3.0;
      x(i) = lo + (hi - lo) * (0.02 + 0.96 * u(rng));
    }
    if (!m.in_domain(x)) continue;
    if (eig_hermitian(m.raw_state(x)).values.minCoeff() < margin) continue;
    return x;
  }
  throw std::runtime_error("no admissible random point");
}

}  // namespace testing

#endif
