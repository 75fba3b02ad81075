#include "qnuis/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qnuis/errors.hpp"
#include "qnuis/zoo.hpp"

namespace qnuis {

void POVM::validate() const {
  if (effects.empty()) throw InvalidPOVMError("POVM has no effects");
  if (labels.size() != effects.size()) throw InvalidPOVMError("POVM label count does not match effect count");
  const int d = dim();
  CMat sum = CMat::Zero(d, d);
  for (const auto& e : effects) {
    if (e.rows() != d || e.cols() != d) throw InvalidPOVMError("POVM effects have different shapes");
    if (hermiticity_defect(e) > 1e-10) throw InvalidPOVMError("POVM effect is not Hermitian");
    if (eig_hermitian(e).values.minCoeff() < -1e-10) throw InvalidPOVMError("POVM effect is not positive semidefinite");
    sum += e;
  }
  if (max_abs(sum - CMat::Identity(d, d)) > tol::povm_completeness) throw InvalidPOVMError("POVM effects do not sum to the identity");
}

POVM make_povm(std::vector<CMat> effects, std::vector<std::string> labels) {
  if (labels.empty())
    for (std::size_t i = 0; i < effects.size(); ++i) labels.push_back(std::to_string(i));
  for (auto& e : effects) e = hermitian_part(e);
  POVM p{std::move(effects), std::move(labels)};
  p.validate();
  return p;
}

POVM computational_basis(int d) {
  std::vector<CMat> e;
  std::vector<std::string> labels;
  for (int i = 0; i < d; ++i) {
    CMat p = CMat::Zero(d, d);
    p(i, i) = 1.0;
    e.push_back(p);
    labels.push_back(std::to_string(i + 1));
  }
  return make_povm(e, labels);
}

POVM pauli_povm() {
  std::vector<CMat> e;
  std::vector<std::string> labels;
  const char axes[3] = {'X', 'Y', 'Z'};
  for (char a : axes)
    for (int s : {1, -1}) {
      e.push_back((CMat::Identity(2, 2) + static_cast<double>(s) * pauli(a)) / 6.0);
      labels.push_back(std::string(s > 0 ? "+" : "-") + a);
    }
  return make_povm(e, labels);
}

namespace {

CMat haar_unitary(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

}  // namespace

POVM default_ic_povm(int d) {
  if (d == 2) return pauli_povm();
  std::mt19937_64 rng(0x1c9a5eedULL + static_cast<unsigned>(d));
  std::vector<CMat> e;
  std::vector<std::string> labels;
  for (int b = 0; b <= d; ++b) {
    CMat u = b == 0 ? CMat::Identity(d, d) : haar_unitary(rng, d);
    for (int j = 0; j < d; ++j) {
      e.push_back(u.col(j) * u.col(j).adjoint() / static_cast<double>(d + 1));
      labels.push_back("b" + std::to_string(b) + "_" + std::to_string(j + 1));
    }
  }
  return make_povm(e, labels);
}

POVM random_povm(std::mt19937_64& rng, int d, int outcomes) {
  std::normal_distribution<double> nd;
  std::vector<CMat> a;
  CMat s = CMat::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    CMat g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
    a.push_back(g * g.adjoint());
    s += a.back();
  }
  HermitianEigen es = eig_hermitian(s);
  CMat s_inv_half = es.vectors * es.values.cwiseSqrt().cwiseInverse().asDiagonal() * es.vectors.adjoint();
  for (auto& x : a) x = s_inv_half * x * s_inv_half;
  return make_povm(a);
}

SpectralPVM spectral_pvm(const CMat& x, double gap) {
  HermitianEigen es = eig_hermitian(x);
  const int n = static_cast<int>(es.values.size());
  SpectralPVM out;
  std::vector<double> vals;
  std::vector<CMat> projs;
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || es.values(i) - es.values(i - 1) > gap * std::max(1.0, std::abs(es.values(i)))) {
      CMat p = CMat::Zero(n, n);
      double mean = 0.0;
      for (int k = start; k < i; ++k) {
        p += es.vectors.col(k) * es.vectors.col(k).adjoint();
        mean += es.values(k);
      }
      vals.push_back(mean / (i - start));
      projs.push_back(p);
      start = i;
    }
  }
  out.eigenvalues = Eigen::Map<RVec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  out.pvm = make_povm(projs);
  return out;
}

RVec born_distribution(const CMat& rho, const POVM& povm) {
  RVec p(povm.size());
  for (int x = 0; x < povm.size(); ++x) p(x) = (rho * povm.effects[x]).trace().real();
  return p;
}

namespace {

RMat outcome_derivatives(const LocalModel& lm, const POVM& povm) {
  RMat d(povm.size(), lm.dim_param());
  for (int x = 0; x < povm.size(); ++x)
    for (int i = 0; i < lm.dim_param(); ++i) d(x, i) = (lm.derivatives()[i] * povm.effects[x]).trace().real();
  return d;
}

RMat fisher_from(const RVec& p, const RMat& d, const std::vector<std::string>& labels) {
  RMat j = RMat::Zero(d.cols(), d.cols());
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p(x) > tol::prob_floor) {
      j += d.row(x).transpose() * d.row(x) / p(x);
    } else if (d.row(x).cwiseAbs().maxCoeff() > 1e-8) {
      throw SingularOutcomeError("outcome " + labels[x] + " has vanishing probability but non-zero derivative");
    }
  }
  return 0.5 * (j + j.transpose());
}

}  // namespace

QFIM classical_fisher_of_povm(const LocalModel& lm, const POVM& povm) {
  if (povm.dim() != lm.dim_hilbert()) throw DimensionError("POVM dimension does not match the state");
  RVec p = born_distribution(lm.rho(), povm);
  RMat j = fisher_from(p, outcome_derivatives(lm, povm), povm.labels);
  RMat js = sld_fisher(lm).real();
  Eigen::SelfAdjointEigenSolver<RMat> es(js - j);
  if (es.eigenvalues().minCoeff() < -tol::fisher_dominance * std::max(1.0, js.cwiseAbs().maxCoeff()))
    throw ConsistencyError("classical Fisher matrix exceeds the SLD Fisher matrix");
  return {FisherKind::Classical, j.cast<cplx>(), lm.point()};
}

ClassicalModel induced_model(const StateModel& model, const POVM& povm, double min_eigenvalue) {
  if (povm.dim() != model.dim_hilbert()) throw DimensionError("POVM dimension does not match the model");
  auto prob = [model, povm](const RVec& theta) { return born_distribution(model.evaluate(theta), povm); };
  auto deriv = [model, povm](const RVec& theta) {
    std::vector<CMat> d = model.derivatives(theta);
    RMat out(povm.size(), model.dim_param());
    for (int x = 0; x < povm.size(); ++x)
      for (int i = 0; i < model.dim_param(); ++i) out(x, i) = (d[i] * povm.effects[x]).trace().real();
    return out;
  };
  auto inside = [model, min_eigenvalue](const RVec& theta) {
    if (!model.in_domain(theta)) return false;
    try {
      return eig_hermitian(model.evaluate(theta)).values.minCoeff() >= min_eigenvalue;
    } catch (const Error&) {
      return false;
    }
  };
  return ClassicalModel(povm.size(), model.dim_param(), prob, deriv, model.domain(), povm.labels, inside);
}

ScalarOptimalMeasurement optimal_pvm_scalar(const StateModel& model, const RVec& theta, const Partition& partition) {
  if (partition.d_interest() != 1) throw DimensionError("the scalar optimal measurement needs exactly one interest parameter");
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the model");
  LocalModel lm = local_model(model, theta);
  LogDerivativeSet ops = sld(lm);
  QFIM jq = fisher_matrix(ops, lm.rho());
  RMat j = jq.real();
  std::vector<CMat> duals = dual_operators(ops, jq);
  const double j11 = inverse_pd(j, "SLD Fisher matrix")(0, 0);

  SpectralPVM sp = spectral_pvm(duals[0]);
  const int d = model.dim_param();
  RVec t = RVec::Zero(d);
  t(0) = 1.0;
  if (d > 1) t.tail(d - 1) = -inverse_pd(RMat(j.bottomRightCorner(d - 1, d - 1)), "nuisance Fisher block") * j.bottomLeftCorner(d - 1, 1);

  RVec p = born_distribution(lm.rho(), sp.pvm);
  RMat dp = outcome_derivatives(lm, sp.pvm);
  const int m = sp.pvm.size();
  ScalarOptimalMeasurement out;
  out.pvm = sp.pvm;
  out.eigenvalues = sp.eigenvalues;
  out.estimates.resize(m);
  for (int x = 0; x < m; ++x)
    out.estimates(x) = p(x) > tol::prob_floor ? theta(0) + j11 * dp.row(x).dot(t) / p(x) : theta(0) + sp.eigenvalues(x);
  out.target = j11;
  out.variance = 0.0;
  for (int x = 0; x < m; ++x) out.variance += p(x) * std::pow(out.estimates(x) - theta(0), 2);

  const double scale = std::max(1.0, j11);
  if (std::abs(out.variance - j11) > 1e-8 * scale) throw ConsistencyError("optimal PVM does not attain the SLD bound");
  if (std::abs(p.dot(out.estimates) - theta(0)) > 1e-8 * scale) throw ConsistencyError("optimal estimator is biased");
  RVec grad = dp.transpose() * out.estimates;
  for (int i = 0; i < d; ++i)
    if (std::abs(grad(i) - (i == 0 ? 1.0 : 0.0)) > 1e-8 * scale) throw ConsistencyError("optimal estimator is not locally unbiased");

  out.fd_residual = 0.0;
  for (int i = 0; i < d; ++i) {
    const double h = 1e-4 * std::max(1.0, std::abs(theta(i)));
    RVec a = theta, b = theta;
    a(i) += h;
    b(i) -= h;
    if (!model.in_domain(a) || !model.in_domain(b)) continue;
    double ea = born_distribution(model.evaluate(a), sp.pvm).dot(out.estimates);
    double eb = born_distribution(model.evaluate(b), sp.pvm).dot(out.estimates);
    out.fd_residual = std::max(out.fd_residual, std::abs((ea - eb) / (2.0 * h) - (i == 0 ? 1.0 : 0.0)));
  }
  if (out.fd_residual > 1e-6) throw ConsistencyError("finite-difference check of local unbiasedness failed");
  return out;
}

LocalEstimator locally_unbiased_estimator(const StateModel& model, const RVec& theta, const POVM& povm,
                                          const Partition& partition) {
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the model");
  LocalModel lm = local_model(model, theta);
  RVec p = born_distribution(lm.rho(), povm);
  RMat dp = outcome_derivatives(lm, povm);
  RMat j = classical_fisher_of_povm(lm, povm).real();
  const int di = partition.d_interest(), dn = partition.d_nuisance(), m = povm.size();

  RMat u = RMat::Zero(m, model.dim_param());
  for (int x = 0; x < m; ++x)
    if (p(x) > tol::prob_floor) u.row(x) = dp.row(x) / p(x);
  RMat coupling = dn > 0 ? RMat(j.topRightCorner(di, dn) * pseudo_inverse(RMat(j.bottomRightCorner(dn, dn)), tol::pinv_cutoff))
                         : RMat::Zero(di, 0);
  RMat ueff = u.leftCols(di);
  RMat part = j.topLeftCorner(di, di);
  if (dn > 0) {
    ueff -= u.rightCols(dn) * coupling.transpose();
    part -= coupling * j.bottomLeftCorner(dn, di);
  }
  part = 0.5 * (part + part.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(part);
  if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw RankError("partial classical Fisher matrix of the measurement is singular");
  RMat part_inv = inverse_pd(part, "partial classical Fisher matrix");

  LocalEstimator est;
  est.point = theta;
  est.fisher = j;
  est.partial = part;
  est.values = (ueff * part_inv).rowwise() + theta.head(di).transpose();

  const double scale = std::max(1.0, part_inv.cwiseAbs().maxCoeff());
  RVec mean = est.values.transpose() * p;
  if ((mean - theta.head(di)).cwiseAbs().maxCoeff() > 1e-8 * scale) throw ConsistencyError("estimator is biased");
  RMat grad = est.values.transpose() * dp;  // d_I x d
  RMat want = RMat::Zero(di, model.dim_param());
  want.leftCols(di).setIdentity();
  if ((grad - want).cwiseAbs().maxCoeff() > 1e-8 * scale) throw ConsistencyError("estimator is not locally unbiased");
  RMat centered = est.values.rowwise() - theta.head(di).transpose();
  est.covariance = centered.transpose() * p.asDiagonal() * centered;
  return est;
}

PvmIndependence pvm_theta_independence_check(const StateModel& model, const std::vector<RVec>& grid,
                                             const Partition& partition, double tolerance) {
  if (grid.empty()) throw ConfigError("grid is empty");
  if (partition.d_interest() != 1) throw DimensionError("the PVM check needs exactly one interest parameter");
  PvmIndependence out{true, 0.0, true, 0.0};
  std::vector<CMat> ref;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    LocalModel lm = local_model(model, grid[g]);
    LogDerivativeSet ops = sld(lm);
    QFIM jq = fisher_matrix(ops, lm.rho());
    RMat j = jq.real();
    for (int k = 1; k < j.cols(); ++k)
      out.max_offdiag = std::max(out.max_offdiag, std::abs(j(0, k)) / std::sqrt(j(0, 0) * j(k, k)));
    SpectralPVM sp = spectral_pvm(dual_operators(ops, jq)[0]);
    if (g == 0) {
      ref = sp.pvm.effects;
      continue;
    }
    if (sp.pvm.effects.size() != ref.size()) {
      out.max_distance = INFINITY;
      continue;
    }
    for (const auto& e : sp.pvm.effects) {
      double best = INFINITY;
      for (const auto& r : ref) best = std::min(best, std::sqrt((e - r).squaredNorm()));
      out.max_distance = std::max(out.max_distance, best);
    }
  }
  out.independent = out.max_distance <= tolerance;
  out.orthogonal_on_grid = out.max_offdiag <= tolerance;
  return out;
}

}  // namespace qnuis
