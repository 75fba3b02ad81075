#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "qnuis/bounds.hpp"
#include "qnuis/errors.hpp"

namespace qnuis {

namespace {

double s_inner(const CMat& rho, const CMat& x, const CMat& y) { return sld_inner(rho, x, y).real(); }

// Gram-Schmidt step against `basis` (twice, for stability); returns the residual.
CMat orthogonal_residual(const CMat& rho, const CMat& x, const std::vector<CMat>& basis) {
  CMat r = x;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) r -= s_inner(rho, b, r) * b;
  return hermitian_part(r);
}

// Smoothed nuclear norm sum_i sqrt(sigma_i^2 + eps^2) of a real matrix and its gradient.
double smoothed_nuclear(const RMat& s, double eps, RMat* grad) {
  RMat sts = s.transpose() * s;
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (sts + sts.transpose()));
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  double val = 0.0;
  RVec inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double r = std::sqrt(lam(i) + eps * eps);
    val += r;
    inv(i) = r > 0.0 ? 1.0 / r : 0.0;
  }
  if (grad) *grad = s * (es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
  return val;
}

struct Bfgs {
  const HolevoProblem& prob;
  int k, m;

  RMat unflatten(const RVec& x) const { return Eigen::Map<const RMat>(x.data(), k, m); }
  RVec flatten(const RMat& a) const { return Eigen::Map<const RVec>(a.data(), a.size()); }

  RVec minimize(RVec x, double eps, int max_iter) const {
    const int n = static_cast<int>(x.size());
    double f = prob.objective(unflatten(x), eps);
    RVec g = flatten(prob.gradient(unflatten(x), eps));
    RMat h = RMat::Identity(n, n);
    int stall = 0;
    for (int it = 0; it < max_iter; ++it) {
      if (g.lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + std::abs(f))) break;
      RVec p = -h * g;
      double slope = p.dot(g);
      if (slope >= 0.0) {
        h.setIdentity();
        p = -g;
        slope = -g.squaredNorm();
      }
      double step = 1.0, fn = f;
      RVec xn;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        xn = x + step * p;
        fn = prob.objective(unflatten(xn), eps);
        if (fn <= f + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (h.isIdentity()) break;
        h.setIdentity();
        continue;
      }
      RVec gn = flatten(prob.gradient(unflatten(xn), eps));
      RVec s = xn - x, y = gn - g;
      double sy = s.dot(y);
      if (sy > 1e-300) {
        double rhoi = 1.0 / sy;
        RMat v = RMat::Identity(n, n) - rhoi * s * y.transpose();
        h = v * h * v.transpose() + rhoi * s * s.transpose();
      }
      stall = (f - fn <= 1e-16 * (1.0 + std::abs(f))) ? stall + 1 : 0;
      x = xn;
      f = fn;
      g = gn;
      if (stall >= 5) break;
    }
    return x;
  }

  // Compass search on the exact (unsmoothed) objective.
  RVec polish(RVec x, double scale) const {
    double f = prob.objective(unflatten(x), 0.0);
    double step = 1e-4 * scale;
    while (step > 1e-12 * scale) {
      bool improved = false;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        for (double sgn : {1.0, -1.0}) {
          RVec xn = x;
          xn(i) += sgn * step;
          double fn = prob.objective(unflatten(xn), 0.0);
          if (fn < f) {
            x = xn;
            f = fn;
            improved = true;
          }
        }
      if (!improved) step *= 0.25;
    }
    return x;
  }
};

}  // namespace

DInvariantExtension d_invariant_extension(const LocalModel& lm, const std::vector<CMat>& generators) {
  const CMat& rho = lm.rho();
  DInvariantExtension ext;
  for (const auto& gen : generators) {
    CMat centered = hermitian_part(gen) - (rho * gen).trace().real() * CMat::Identity(rho.rows(), rho.cols());
    CMat r = orthogonal_residual(rho, centered, ext.tangent);
    double nrm = std::sqrt(std::max(0.0, s_inner(rho, r, r)));
    double ref = std::sqrt(std::max(0.0, s_inner(rho, centered, centered)));
    if (nrm > 1e-9 * std::max(1.0, ref)) ext.tangent.push_back(r / nrm);
  }
  std::vector<CMat> all = ext.tangent;
  const std::size_t cap = static_cast<std::size_t>(lm.dim_hilbert() * lm.dim_hilbert() - 1);
  for (std::size_t i = 0; i < all.size() && all.size() < cap; ++i) {
    CMat dv = commutation_operator(lm, all[i]);
    CMat r = orthogonal_residual(rho, dv, all);
    double nrm = std::sqrt(std::max(0.0, s_inner(rho, r, r)));
    if (nrm > 1e-9) {
      all.push_back(r / nrm);
      ext.complement.push_back(r / nrm);
    }
  }
  return ext;
}

HolevoProblem holevo_problem(const LocalModel& lm, const RMat& g, const WeightMatrix& w) {
  const int d = lm.dim_param();
  if (g.cols() != d) throw DimensionError("target Jacobian has the wrong number of columns");
  if (w.dim() != g.rows()) throw DimensionError("weight matrix does not match the number of estimated quantities");
  Eigen::FullPivLU<RMat> lu(g);
  lu.setThreshold(1e-10);
  if (lu.rank() < g.rows()) throw RankError("target Jacobian does not have full row rank");

  LogDerivativeSet ops = sld(lm);
  QFIM j = fisher_matrix(ops, lm.rho());
  std::vector<CMat> duals = dual_operators(ops, j);
  DInvariantExtension ext = d_invariant_extension(lm, ops.operators);

  const int k = static_cast<int>(g.rows());
  const int m = static_cast<int>(ext.complement.size());
  std::vector<CMat> basis;
  for (int a = 0; a < k; ++a) {
    CMat x = CMat::Zero(lm.dim_hilbert(), lm.dim_hilbert());
    for (int i = 0; i < d; ++i) x += g(a, i) * duals[i];
    basis.push_back(x);
  }
  for (const auto& f : ext.complement) basis.push_back(f);

  // Feasibility of the base operators: tr[d_i rho X_a] = G_ai.
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < d; ++i) {
      double c = (lm.derivatives()[i] * basis[a]).trace().real();
      if (std::abs(c - g(a, i)) > 1e-7 * std::max(1.0, g.cwiseAbs().maxCoeff()))
        throw InfeasibleError("dual operators do not satisfy the unbiasedness constraints");
    }

  HolevoProblem p;
  p.q = z_matrix(basis, lm.rho());
  p.k = k;
  p.m = m;
  p.weight = w.entries();
  p.weight_sqrt = w.sqrt();
  return p;
}

double HolevoProblem::objective(const RMat& a, double eps) const {
  RMat c(k, k + m);
  c.leftCols(k).setIdentity();
  if (m > 0) c.rightCols(m) = a;
  RMat re = c * q.real() * c.transpose();
  RMat im = c * q.imag() * c.transpose();
  RMat s = weight_sqrt * im * weight_sqrt;
  double nuc = eps > 0.0 ? smoothed_nuclear(s, eps, nullptr) : trace_norm(s);
  return (weight * re).trace() + nuc;
}

RMat HolevoProblem::gradient(const RMat& a, double eps) const {
  RMat c(k, k + m);
  c.leftCols(k).setIdentity();
  if (m > 0) c.rightCols(m) = a;
  RMat qr = q.real(), qi = q.imag();
  RMat im = c * qi * c.transpose();
  RMat s = weight_sqrt * im * weight_sqrt;
  RMat gs;
  smoothed_nuclear(s, std::max(eps, 1e-300), &gs);
  RMat gk = weight_sqrt * gs * weight_sqrt;
  RMat gc = weight * c * (qr + qr.transpose()) + gk * c * qi.transpose() + gk.transpose() * c * qi;
  return gc.rightCols(m);
}

HolevoResult holevo_numeric(const LocalModel& lm, const RMat& target_jacobian, const WeightMatrix& w,
                            const HolevoOptions& options) {
  HolevoProblem prob = holevo_problem(lm, target_jacobian, w);
  HolevoResult res;
  res.extension_dim = prob.m;
  RMat zero = RMat::Zero(prob.k, prob.m);
  res.sld_value = (prob.weight * prob.q.real().topLeftCorner(prob.k, prob.k)).trace();
  double at_zero = prob.objective(zero, 0.0);
  if (prob.m == 0) {
    res.value = at_zero;
    res.starts = 1;
    res.start_values = {at_zero};
    res.coefficients = zero;
    return res;
  }

  const double scale = std::sqrt(std::max(1e-300, prob.q.real().topLeftCorner(prob.k, prob.k).trace() / prob.k));
  const int nstarts = 1 + std::max(0, options.random_starts);
  std::vector<RVec> starts(nstarts);
  starts[0] = RVec::Zero(prob.k * prob.m);
  for (int s = 1; s < nstarts; ++s) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(s)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> nd(0.0, scale);
    starts[s] = RVec(prob.k * prob.m);
    for (Eigen::Index i = 0; i < starts[s].size(); ++i) starts[s](i) = nd(gen);
  }

  Bfgs opt{prob, prob.k, prob.m};
  std::vector<RVec> finals(nstarts);
  std::vector<double> values(nstarts);
  auto run = [&](int s) {
    RVec x = starts[s];
    for (double eps = options.eps_start; eps >= options.eps_final * 0.999; eps *= 0.1) x = opt.minimize(x, eps * scale, 2000);
    x = opt.polish(x, scale);
    finals[s] = x;
    values[s] = prob.objective(opt.unflatten(x), 0.0);
  };
  const int threads = std::max(1, std::min(options.threads, nstarts));
  if (threads == 1) {
    for (int s = 0; s < nstarts; ++s) run(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int s = t; s < nstarts; s += threads) run(s);
      });
    for (auto& th : pool) th.join();
  }

  int best = 0;
  for (int s = 1; s < nstarts; ++s)
    if (values[s] < values[best]) best = s;
  res.value = values[best];
  res.starts = nstarts;
  res.start_values = values;
  res.start_spread = *std::max_element(values.begin(), values.end()) - values[best];
  res.coefficients = opt.unflatten(finals[best]);
  if (!std::isfinite(res.value)) throw OptimizerError("Holevo optimizer produced a non-finite value");
  if (res.start_spread > options.tolerance * std::max(1.0, std::abs(res.value)))
    throw OptimizerError("Holevo optimizer starts disagree by " + std::to_string(res.start_spread));
  if (res.value < res.sld_value - options.tolerance * std::max(1.0, res.sld_value))
    throw ConsistencyError("Holevo value fell below the SLD bound");
  return res;
}

HolevoResult holevo_numeric(const LocalModel& lm, const Partition& partition, const WeightMatrix& w,
                            const HolevoOptions& options) {
  if (partition.d_total() != lm.dim_param()) throw DimensionError("partition does not match the model");
  RMat g = RMat::Zero(partition.d_interest(), partition.d_total());
  g.leftCols(partition.d_interest()).setIdentity();
  return holevo_numeric(lm, g, w, options);
}

}  // namespace qnuis
