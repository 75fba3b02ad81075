#include "qnuis/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnuis/errors.hpp"

namespace qnuis {

PartialFisher partial_fisher(const QFIM& fisher, const Partition& partition) {
  if (fisher.dim() != partition.d_total()) throw DimensionError("partition does not match Fisher matrix");
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  CMat jii = fisher.entries.topLeftCorner(di, di);
  if (dn == 0) return {fisher.kind, jii, fisher.point, partition};
  CMat jin = fisher.entries.topRightCorner(di, dn);
  CMat jnn = fisher.entries.bottomRightCorner(dn, dn);
  CMat part = jii - jin * inverse_pd(jnn, "nuisance Fisher block") * jin.adjoint();
  part = hermitian_part(part);
  if (fisher.kind != FisherKind::RLD) part = part.real().cast<cplx>();
  return {fisher.kind, part, fisher.point, partition};
}

std::vector<CMat> effective_log_derivatives(const LogDerivativeSet& ops, const QFIM& fisher, const Partition& partition) {
  if (static_cast<int>(ops.operators.size()) != partition.d_total() || fisher.dim() != partition.d_total())
    throw DimensionError("partition does not match operator count");
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  std::vector<CMat> out(ops.operators.begin(), ops.operators.begin() + di);
  if (dn == 0) return out;
  CMat jnn_inv = inverse_pd(CMat(fisher.entries.bottomRightCorner(dn, dn)), "nuisance Fisher block");
  CMat coeff = jnn_inv * fisher.entries.bottomLeftCorner(dn, di);  // column i holds the projection weights
  for (int i = 0; i < di; ++i) {
    for (int k = 0; k < dn; ++k) out[i] -= coeff(k, i) * ops.operators[di + k];
    if (ops.kind == LogDerivativeKind::SLD) out[i] = hermitian_part(out[i]);
  }
  return out;
}

std::vector<CMat> effective_slds(const LocalModel& lm, const Partition& partition) {
  LogDerivativeSet ops = sld(lm);
  return effective_log_derivatives(ops, fisher_matrix(ops, lm.rho()), partition);
}

std::vector<CMat> effective_rlds(const LocalModel& lm, const Partition& partition) {
  LogDerivativeSet ops = rld(lm);
  return effective_log_derivatives(ops, fisher_matrix(ops, lm.rho()), partition);
}

RVec OrthoTransform::to_xi(const RVec& theta) const {
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  RVec xi = theta;
  if (dn > 0) xi.tail(dn) += coupling * (theta.head(di) - reference.head(di));
  return xi;
}

RVec OrthoTransform::to_theta(const RVec& xi) const {
  const int di = partition.d_interest(), dn = partition.d_nuisance();
  RVec theta = xi;
  if (dn > 0) theta.tail(dn) -= coupling * (xi.head(di) - reference.head(di));
  return theta;
}

OrthoTransform local_orthogonalize(const QFIM& fisher_at_reference, const Partition& partition) {
  if (fisher_at_reference.kind == FisherKind::RLD) throw ConfigError("local orthogonalization uses a real Fisher matrix");
  if (fisher_at_reference.dim() != partition.d_total()) throw DimensionError("partition does not match Fisher matrix");
  const int d = partition.d_total(), di = partition.d_interest(), dn = partition.d_nuisance();
  RMat j = fisher_at_reference.real();
  RMat coupling = RMat::Zero(dn, di);
  if (dn > 0) coupling = inverse_pd(RMat(j.bottomRightCorner(dn, dn)), "nuisance Fisher block") * j.bottomLeftCorner(dn, di);
  RMat t = RMat::Identity(d, d);
  if (dn > 0) t.topRightCorner(di, dn) = -coupling.transpose();
  return {t, fisher_at_reference.point, partition, coupling};
}

OrthoTransform local_orthogonalize(const StateModel& model, const RVec& reference, const Partition& partition) {
  return local_orthogonalize(sld_fisher(local_model(model, reference)), partition);
}

StateModel orthogonalized_model(const StateModel& model, const OrthoTransform& transform) {
  OrthoTransform tr = transform;
  Reparametrization map{[tr](const RVec& xi) { return tr.to_theta(xi); },
                        [tr](const RVec&) { return tr.jacobian; }};
  std::vector<std::string> labels;
  for (int i = 0; i < model.dim_param(); ++i) labels.push_back("xi" + std::to_string(i + 1));
  return reparametrize(model, map, std::vector<Interval>(model.dim_param(), Interval{}), labels);
}

namespace {

RVec ode_rhs(const StateModel& model, const RVec& theta) {
  if (!model.in_domain(theta)) throw StepError("orthogonalization trajectory left the parameter domain");
  RMat j = sld_fisher(local_model(model, theta)).real();
  const int dn = model.dim_param() - 1;
  RVec t(model.dim_param());
  t(0) = 1.0;
  t.tail(dn) = -inverse_pd(RMat(j.bottomRightCorner(dn, dn)), "nuisance Fisher block") * j.bottomLeftCorner(dn, 1);
  return t;
}

RVec rk4_steps(const StateModel& model, RVec y, double h, int n) {
  for (int s = 0; s < n; ++s) {
    RVec k1 = ode_rhs(model, y);
    RVec k2 = ode_rhs(model, y + 0.5 * h * k1);
    RVec k3 = ode_rhs(model, y + 0.5 * h * k2);
    RVec k4 = ode_rhs(model, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

RVec advance(const StateModel& model, const RVec& y, double span, const OdeOptions& opt) {
  if (span == 0.0) return y;
  int n = 1;
  if (opt.max_step > 0.0) n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / opt.max_step - 1e-12)));
  RVec coarse = rk4_steps(model, y, span / n, n);
  for (int level = 0; level < 14; ++level) {
    RVec fine = rk4_steps(model, y, span / (2 * n), 2 * n);
    // Richardson estimate of the remaining error of the fine solution.
    if ((fine - coarse).cwiseAbs().maxCoeff() / 15.0 <= 0.01 * opt.tolerance) return fine;
    coarse = fine;
    n *= 2;
  }
  throw ConvergenceError("orthogonalization ODE did not reach the requested accuracy");
}

}  // namespace

std::vector<TrajectoryPoint> global_orthogonalize_ode(const StateModel& model, const RVec& start,
                                                      const std::vector<double>& grid, const OdeOptions& options) {
  if (model.dim_param() < 2) throw DimensionError("global orthogonalization needs at least one nuisance parameter");
  if (grid.empty()) throw ConfigError("orthogonalization grid is empty");
  model.check_domain(start);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if ((grid[i] - grid[i - 1]) * (grid.back() - grid.front()) <= 0.0) throw ConfigError("orthogonalization grid must be strictly monotone");

  OdeOptions opt = options;
  if (opt.max_step <= 0.0) opt.max_step = grid.size() > 1 ? std::abs(grid[1] - grid[0]) : 0.0;

  std::vector<TrajectoryPoint> out;
  RVec y = start;
  double x = start(0);
  for (double target : grid) {
    y = advance(model, y, target - x, opt);
    y(0) = target;
    x = target;
    LocalModel lm = local_model(model, y);
    RMat j = sld_fisher(lm).real();
    RVec t = ode_rhs(model, y);
    RVec jt = j * t;
    TrajectoryPoint p;
    p.xi1 = target;
    p.theta = y;
    p.tangent = t;
    p.orthogonality = jt.tail(model.dim_param() - 1).cwiseAbs().maxCoeff();
    p.inverse_fisher_11 = inverse_pd(j, "SLD Fisher matrix")(0, 0);
    p.tangent_fisher = t.dot(jt);
    out.push_back(p);
  }
  return out;
}

}  // namespace qnuis
