#include "qnuis/classify.hpp"

#include <algorithm>
#include <cmath>

#include "qnuis/errors.hpp"
#include "qnuis/nuisance.hpp"

namespace qnuis {

namespace {

double s_norm(const CMat& rho, const CMat& x) { return std::sqrt(std::max(0.0, sld_inner(rho, x, x).real())); }

// Residual of x after S-orthogonal projection onto span(ops).
CMat project_off(const CMat& rho, const CMat& x, const std::vector<CMat>& ops) {
  const int n = static_cast<int>(ops.size());
  RMat g(n, n);
  RVec b(n);
  for (int i = 0; i < n; ++i) {
    b(i) = sld_inner(rho, ops[i], x).real();
    for (int j = 0; j < n; ++j) g(i, j) = sld_inner(rho, ops[i], ops[j]).real();
  }
  RVec c = pseudo_inverse(g, tol::pinv_cutoff) * b;
  CMat r = x;
  for (int i = 0; i < n; ++i) r -= c(i) * ops[i];
  return r;
}

double span_d_residual(const LocalModel& lm, const std::vector<CMat>& ops) {
  double worst = 0.0;
  for (const auto& l : ops) {
    CMat r = project_off(lm.rho(), commutation_operator(lm, l), ops);
    worst = std::max(worst, s_norm(lm.rho(), r) / std::max(1e-300, s_norm(lm.rho(), l)));
  }
  return worst;
}

double relative_gap(const CMat& a, const CMat& b) {
  return max_abs(a - b) / std::max(1e-300, std::max(max_abs(a), max_abs(b)));
}

void cross_check(bool primary, double secondary_residual, double tolerance, const char* what) {
  if (primary && secondary_residual > 100.0 * tolerance)
    throw ConsistencyError(std::string(what) + ": equivalent conditions disagree");
  if (!primary && secondary_residual < 0.01 * tolerance)
    throw ConsistencyError(std::string(what) + ": equivalent conditions disagree");
}

bool has_nuisance(const std::optional<Partition>& p) { return p && p->has_nuisance(); }

Partition resolve(const LocalModel& lm, const std::optional<Partition>& p) {
  Partition out = p ? *p : Partition::full(lm.dim_param());
  if (out.d_total() != lm.dim_param()) throw DimensionError("partition does not match the model");
  return out;
}

}  // namespace

double effective_span_d_residual(const LocalModel& lm, const Partition& partition) {
  return span_d_residual(lm, effective_slds(lm, partition));
}

ClassFlag is_d_invariant(const LocalModel& lm, const std::optional<Partition>& partition, double tolerance) {
  Partition p = resolve(lm, partition);
  LogDerivativeSet s = sld(lm);
  QFIM js = fisher_matrix(s, lm.rho());
  std::vector<CMat> s_duals = dual_operators(s, js);
  LogDerivativeSet r = rld(lm);
  QFIM jr = fisher_matrix(r, lm.rho());
  std::vector<CMat> r_duals = dual_operators(r, jr);

  if (!has_nuisance(partition)) {
    double res = span_d_residual(lm, s.operators);
    ClassFlag flag{res < tolerance, res};
    CMat zs = z_matrix(s_duals, lm.rho());
    cross_check(flag.value, relative_gap(inverse_pd(jr.entries, "RLD Fisher matrix"), zs), tolerance, "D-invariance");
    return flag;
  }
  double worst = 0.0;
  for (int i = 0; i < p.d_interest(); ++i) {
    double scale = std::max(1e-300, std::sqrt((s_duals[i] * s_duals[i].adjoint()).trace().real()));
    worst = std::max(worst, std::sqrt((s_duals[i] - r_duals[i]).squaredNorm()) / scale);
  }
  return {worst < tolerance, worst};
}

ClassFlag is_asymptotically_classical(const LocalModel& lm, const std::optional<Partition>& partition,
                                      double tolerance) {
  Partition p = resolve(lm, partition);
  std::vector<CMat> eff = effective_slds(lm, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < eff.size(); ++i)
    for (std::size_t j = i + 1; j < eff.size(); ++j) {
      double c = std::abs((lm.rho() * commutator(eff[i], eff[j])).trace());
      worst = std::max(worst, c / std::max(1e-300, s_norm(lm.rho(), eff[i]) * s_norm(lm.rho(), eff[j])));
    }
  ClassFlag flag{worst < tolerance, worst};

  LogDerivativeSet s = sld(lm);
  std::vector<CMat> duals = dual_operators(s, fisher_matrix(s, lm.rho()));
  duals.resize(p.d_interest());
  CMat z = z_matrix(duals, lm.rho());
  RMat re = z.real();
  double im = z.imag().cwiseAbs().maxCoeff() / std::max(1e-300, re.cwiseAbs().maxCoeff());
  cross_check(flag.value, im, tolerance, "asymptotic classicality");
  return flag;
}

ClassFlag is_quasi_classical(const StateModel& model, const std::vector<RVec>& grid,
                             const std::optional<Partition>& partition, double tolerance) {
  if (grid.empty()) throw ConfigError("quasi-classical check needs at least one grid point");
  std::vector<CMat> ops;
  for (const auto& theta : grid) {
    LocalModel lm = local_model(model, theta);
    Partition p = resolve(lm, partition);
    for (auto& l : effective_slds(lm, p)) ops.push_back(l);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      double c = std::sqrt(commutator(ops[i], ops[j]).squaredNorm());
      worst = std::max(worst, c / std::max(1e-300, std::sqrt(ops[i].squaredNorm() * ops[j].squaredNorm())));
    }
  return {worst < tolerance, worst};
}

ClassFlag is_classical(const LocalModel& lm, double tolerance) {
  QFIM js = sld_fisher(lm), jr = rld_fisher(lm);
  double res = relative_gap(jr.entries, js.entries);
  ClassFlag flag{res < tolerance, res};
  double comm = 0.0;
  double rn = std::sqrt(lm.rho().squaredNorm());
  for (const auto& d : lm.derivatives())
    comm = std::max(comm, std::sqrt(commutator(lm.rho(), d).squaredNorm()) / std::max(1e-300, rn * std::sqrt(d.squaredNorm())));
  cross_check(flag.value, comm, tolerance, "classicality");
  return flag;
}

std::vector<RVec> neighbourhood_grid(const StateModel& model, const RVec& theta, double radius) {
  std::vector<RVec> grid{theta};
  for (int i = 0; i < model.dim_param(); ++i)
    for (double sgn : {1.0, -1.0}) {
      double h = radius * std::max(1.0, std::abs(theta(i)));
      for (int tries = 0; tries < 30; ++tries, h *= 0.5) {
        RVec x = theta;
        x(i) += sgn * h;
        bool ok = model.in_domain(x);
        if (ok) {
          try {
            model.evaluate(x);
          } catch (const Error&) {
            ok = false;
          }
        }
        if (ok) {
          grid.push_back(x);
          break;
        }
      }
    }
  return grid;
}

ClassificationReport classify(const StateModel& model, const RVec& theta, const std::optional<Partition>& partition,
                              const std::vector<RVec>& grid) {
  LocalModel lm = local_model(model, theta);
  Partition p = resolve(lm, partition);
  ClassificationReport rep;
  rep.point = theta;
  rep.d_interest = p.d_interest();
  rep.d_total = p.d_total();
  rep.grid = grid.empty() ? neighbourhood_grid(model, theta) : grid;
  rep.flags["d_invariant"] = is_d_invariant(lm, p);
  rep.flags["asymptotically_classical"] = is_asymptotically_classical(lm, p);
  rep.flags["classical"] = is_classical(lm);
  rep.flags["quasi_classical"] = is_quasi_classical(model, rep.grid, p);
  rep.scope = {{"d_invariant", "point"}, {"asymptotically_classical", "point"}, {"classical", "point"},
               {"quasi_classical", "grid"}};
  if (p.has_nuisance()) rep.diagnostics["effective_span_d_residual"] = effective_span_d_residual(lm, p);
  if (rep.flags["classical"].value && !(rep.flags["d_invariant"].value && rep.flags["asymptotically_classical"].value))
    throw ConsistencyError("classical model is not flagged D-invariant and asymptotically classical");
  return rep;
}

}  // namespace qnuis
