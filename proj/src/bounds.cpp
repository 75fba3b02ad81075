#include "qnuis/bounds.hpp"

#include <cmath>

#include "qnuis/errors.hpp"
#include "qnuis/nuisance.hpp"

namespace qnuis {

namespace {

void require_match(const LocalModel& lm, const Partition& partition, const WeightMatrix& w) {
  if (partition.d_total() != lm.dim_param()) throw DimensionError("partition does not match the model");
  if (w.dim() != partition.d_interest()) throw DimensionError("weight matrix does not match the interest block");
}

double rld_value(const CMat& inv, const WeightMatrix& w) {
  RMat re = inv.real(), im = inv.imag();
  return (w.entries() * re).trace() + trace_norm(RMat(w.sqrt() * im * w.sqrt()));
}

}  // namespace

double sld_cr(const LocalModel& lm, const Partition& partition, const WeightMatrix& w) {
  require_match(lm, partition, w);
  PartialFisher pf = partial_fisher(sld_fisher(lm), partition);
  return (w.entries() * inverse_pd(pf.real(), "partial SLD Fisher matrix")).trace();
}

double rld_cr(const LocalModel& lm, const Partition& partition, const WeightMatrix& w) {
  require_match(lm, partition, w);
  PartialFisher pf = partial_fisher(rld_fisher(lm), partition);
  return rld_value(inverse_pd(pf.entries, "partial RLD Fisher matrix"), w);
}

double nagaoka_gm(const LocalModel& lm, const Partition& partition, const WeightMatrix& w) {
  require_match(lm, partition, w);
  if (w.semidefinite()) throw ConfigError("the Gill-Massar bound needs a positive definite weight");
  PartialFisher pf = partial_fisher(sld_fisher(lm), partition);
  RMat wi = inv_sqrt_pd(w.entries());
  RMat m = wi * pf.real() * wi;
  double tr = inv_sqrt_pd(m).trace();
  return tr * tr / (lm.dim_hilbert() - 1);
}

QubitClosedForm holevo_qubit_closed(const LocalModel& lm, const WeightMatrix& w) {
  if (lm.dim_hilbert() != 2 || lm.dim_param() != 2)
    throw ModelShapeError("closed-form Holevo bound needs a two-parameter qubit model");
  if (w.dim() != 2) throw DimensionError("weight matrix must be 2 x 2");
  RMat s = inverse_pd(sld_fisher(lm).real(), "SLD Fisher matrix");
  CMat r = inverse_pd(rld_fisher(lm).entries, "RLD Fisher matrix");
  double c_s = (w.entries() * s).trace();
  double c_r = rld_value(r, w);
  double gap = (w.entries() * (s - r.real())).trace();
  double im = trace_norm(RMat(w.sqrt() * r.imag() * w.sqrt()));
  double indicator = 0.5 * im - gap;
  if (indicator >= 0.0) return {c_r, true, indicator};
  return {c_s + 0.25 * im * im / gap, false, indicator};
}

BoundKind parse_bound_kind(const std::string& name) {
  if (name == "sld" || name == "SLD") return BoundKind::SLD;
  if (name == "rld" || name == "RLD") return BoundKind::RLD;
  if (name == "holevo" || name == "Holevo") return BoundKind::Holevo;
  throw ConfigError("unknown bound kind '" + name + "'");
}

double function_bound(const LocalModel& lm, const RMat& g, const WeightMatrix& w, BoundKind kind,
                      const HolevoOptions& options) {
  if (g.cols() != lm.dim_param()) throw DimensionError("target Jacobian has the wrong number of columns");
  if (w.dim() != g.rows()) throw DimensionError("weight matrix does not match the number of estimated quantities");
  Eigen::FullPivLU<RMat> lu(g);
  lu.setThreshold(1e-10);
  if (lu.rank() < g.rows()) throw RankError("target Jacobian does not have full row rank");
  switch (kind) {
    case BoundKind::SLD: {
      RMat s = inverse_pd(sld_fisher(lm).real(), "SLD Fisher matrix");
      return (w.entries() * g * s * g.transpose()).trace();
    }
    case BoundKind::RLD: {
      CMat r = inverse_pd(rld_fisher(lm).entries, "RLD Fisher matrix");
      CMat gc = g.cast<cplx>();
      return rld_value(gc * r * gc.transpose(), w);
    }
    case BoundKind::Holevo:
      return holevo_numeric(lm, g, w, options).value;
  }
  return 0.0;
}

double function_bound(const StateModel& model, const RVec& theta, const FunctionSpec& g, const WeightMatrix& w,
                      BoundKind kind, const HolevoOptions& options) {
  if (!g.jacobian) throw ConfigError("function specification needs a Jacobian");
  RMat jac = g.jacobian(theta);
  if (jac.rows() != g.k) throw DimensionError("function Jacobian row count differs from K");
  return function_bound(local_model(model, theta), jac, w, kind, options);
}

double generalized_cr(const LocalModel& lm, const RMat& b_mat, const RVec& bias, const WeightMatrix& w) {
  if (b_mat.cols() != lm.dim_param() || b_mat.rows() != bias.size() || w.dim() != bias.size())
    throw DimensionError("bias matrix, bias and weight shapes disagree");
  RMat s = inverse_pd(sld_fisher(lm).real(), "SLD Fisher matrix");
  return (w.entries() * (b_mat * s * b_mat.transpose() + bias * bias.transpose())).trace();
}

LossReport information_loss(const StateModel& model, const RVec& theta, const Partition& partition,
                            const WeightMatrix& w, BoundKind kind, const HolevoOptions& options) {
  if (partition.d_total() != model.dim_param()) throw DimensionError("partition does not match the model");
  LocalModel full = local_model(model, theta);
  StateModel sub = fix_trailing_parameters(model, theta, partition.d_interest());
  LocalModel known = local_model(sub, RVec(theta.head(partition.d_interest())));
  Partition none = Partition::full(partition.d_interest());
  LossReport r{};
  switch (kind) {
    case BoundKind::SLD:
      r.with_nuisance = sld_cr(full, partition, w);
      r.nuisance_known = sld_cr(known, none, w);
      break;
    case BoundKind::RLD:
      r.with_nuisance = rld_cr(full, partition, w);
      r.nuisance_known = rld_cr(known, none, w);
      break;
    case BoundKind::Holevo:
      r.with_nuisance = holevo_numeric(full, partition, w, options).value;
      r.nuisance_known = holevo_numeric(known, none, w, options).value;
      break;
  }
  r.loss = r.with_nuisance - r.nuisance_known;
  const double floor = kind == BoundKind::Holevo ? options.tolerance * std::max(1.0, std::abs(r.with_nuisance)) : 1e-9;
  if (r.loss < -floor)
    throw ConsistencyError("information loss is negative beyond tolerance");
  r.loss = std::max(0.0, r.loss);
  return r;
}

std::vector<std::string> bound_names() {
  return {"sld", "rld", "holevo", "nagaoka", "holevo_closed", "loss_sld", "loss_holevo"};
}

BoundReport compute_bounds(const StateModel& model, const RVec& theta, const Partition& partition,
                           const WeightMatrix& w, const std::vector<std::string>& names,
                           const HolevoOptions& options) {
  LocalModel lm = local_model(model, theta);
  require_match(lm, partition, w);
  BoundReport rep;
  rep.point = theta;
  rep.d_interest = partition.d_interest();
  rep.d_total = partition.d_total();
  rep.weight = w.entries();
  for (const auto& name : names) {
    if (name == "sld") {
      rep.values["sld"] = sld_cr(lm, partition, w);
    } else if (name == "rld") {
      rep.values["rld"] = rld_cr(lm, partition, w);
    } else if (name == "holevo") {
      HolevoResult h = holevo_numeric(lm, partition, w, options);
      rep.values["holevo"] = h.value;
      rep.diagnostics["holevo_start_spread"] = h.start_spread;
      rep.diagnostics["holevo_extension_dim"] = h.extension_dim;
    } else if (name == "nagaoka") {
      rep.values["nagaoka"] = nagaoka_gm(lm, partition, w);
    } else if (name == "holevo_closed") {
      if (partition.has_nuisance()) throw ConfigError("closed-form Holevo bound has no nuisance parameters");
      QubitClosedForm c = holevo_qubit_closed(lm, w);
      rep.values["holevo_closed"] = c.value;
      rep.diagnostics["holevo_closed_rld_branch"] = c.rld_branch ? 1.0 : 0.0;
    } else if (name == "loss_sld") {
      rep.values["loss_sld"] = information_loss(model, theta, partition, w, BoundKind::SLD, options).loss;
    } else if (name == "loss_holevo") {
      rep.values["loss_holevo"] = information_loss(model, theta, partition, w, BoundKind::Holevo, options).loss;
    } else {
      throw ConfigError("unknown bound '" + name + "'");
    }
  }
  auto has = [&](const char* k) { return rep.values.count(k) > 0; };
  const double slack = options.tolerance;
  if (has("sld") && has("holevo")) {
    rep.checks["sld_le_holevo"] = rep.values["sld"] <= rep.values["holevo"] + slack;
    rep.checks["holevo_le_2sld"] = rep.values["holevo"] <= 2.0 * rep.values["sld"] + slack;
  }
  if (has("rld") && has("holevo")) rep.checks["rld_le_holevo"] = rep.values["rld"] <= rep.values["holevo"] + slack;
  return rep;
}

}  // namespace qnuis
