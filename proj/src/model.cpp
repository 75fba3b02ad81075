#include "qnuis/model.hpp"

#include <cmath>
#include <sstream>

#include "qnuis/errors.hpp"

namespace qnuis {

namespace {

std::string describe(const RVec& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

}  // namespace

StateModel::StateModel(int dim_hilbert, int dim_param, StateFn state, DerivFn derivatives,
                       std::vector<Interval> domain, std::vector<std::string> labels,
                       Constraint constraint, double fd_step)
    : dim_hilbert_(dim_hilbert),
      dim_param_(dim_param),
      state_(std::move(state)),
      deriv_(std::move(derivatives)),
      domain_(std::move(domain)),
      labels_(std::move(labels)),
      constraint_(std::move(constraint)),
      fd_step_(fd_step) {
  if (dim_hilbert_ < 2) throw ModelShapeError("Hilbert-space dimension must be at least 2");
  if (dim_param_ < 1) throw ModelShapeError("parameter dimension must be at least 1");
  if (dim_param_ > dim_hilbert_ * dim_hilbert_ - 1)
    throw ModelShapeError("parameter dimension exceeds d_H^2 - 1");
  if (!state_) throw ModelShapeError("state function is empty");
  if (domain_.empty()) domain_.assign(dim_param_, Interval{});
  if (static_cast<int>(domain_.size()) != dim_param_) throw ModelShapeError("domain size does not match parameter dimension");
  if (labels_.empty())
    for (int i = 0; i < dim_param_; ++i) labels_.push_back("theta" + std::to_string(i + 1));
  if (static_cast<int>(labels_.size()) != dim_param_) throw ModelShapeError("label count does not match parameter dimension");
  if (!(fd_step_ > 0.0)) throw ModelShapeError("finite-difference step must be positive");
}

bool StateModel::in_domain(const RVec& theta) const {
  if (theta.size() != dim_param_) return false;
  for (int i = 0; i < dim_param_; ++i)
    if (!std::isfinite(theta(i)) || !domain_[i].contains(theta(i))) return false;
  return !constraint_ || constraint_(theta);
}

void StateModel::check_domain(const RVec& theta) const {
  if (theta.size() != dim_param_)
    throw DimensionError("point has " + std::to_string(theta.size()) + " coordinates, model expects " +
                         std::to_string(dim_param_));
  if (!in_domain(theta)) throw DomainError("point " + describe(theta) + " is outside the parameter domain");
}

CMat StateModel::evaluate(const RVec& theta) const {
  check_domain(theta);
  CMat rho = state_(theta);
  if (rho.rows() != dim_hilbert_ || rho.cols() != dim_hilbert_) throw ModelShapeError("state has the wrong shape");
  if (hermiticity_defect(rho) > tol::hermiticity) throw ModelError("state is not Hermitian at " + describe(theta));
  rho = hermitian_part(rho);
  if (std::abs(rho.trace() - cplx(1.0)) > tol::trace) throw ModelError("state trace differs from one at " + describe(theta));
  double lo = eig_hermitian(rho).values.minCoeff();
  if (lo < tol::positivity)
    throw ModelError("state is not full rank at " + describe(theta) + " (smallest eigenvalue " + std::to_string(lo) + ")");
  return rho;
}

std::vector<CMat> StateModel::finite_difference_derivatives(const RVec& theta) const {
  std::vector<CMat> out;
  out.reserve(dim_param_);
  for (int i = 0; i < dim_param_; ++i) {
    const double h = fd_step_ * std::max(1.0, std::abs(theta(i)));
    RVec plus = theta, minus = theta;
    plus(i) += h;
    minus(i) -= h;
    bool up = in_domain(plus), down = in_domain(minus);
    if (up && down) {
      out.push_back((state_(plus) - state_(minus)) / (2.0 * h));
    } else if (up) {
      RVec plus2 = theta;
      plus2(i) += 2.0 * h;
      out.push_back((-3.0 * state_(theta) + 4.0 * state_(plus) - state_(plus2)) / (2.0 * h));
    } else if (down) {
      RVec minus2 = theta;
      minus2(i) -= 2.0 * h;
      out.push_back((3.0 * state_(theta) - 4.0 * state_(minus) + state_(minus2)) / (2.0 * h));
    } else {
      throw StepError("finite-difference step leaves the domain in both directions at " + describe(theta));
    }
  }
  return out;
}

std::vector<CMat> StateModel::derivatives(const RVec& theta) const {
  check_domain(theta);
  std::vector<CMat> d = deriv_ ? deriv_(theta) : finite_difference_derivatives(theta);
  if (static_cast<int>(d.size()) != dim_param_) throw ModelShapeError("derivative count does not match parameter dimension");
  const double herm_tol = deriv_ ? tol::hermiticity : tol::fd_hermiticity;
  const int m = dim_hilbert_ * dim_hilbert_;
  RMat vecs(2 * m, dim_param_);
  for (int i = 0; i < dim_param_; ++i) {
    if (d[i].rows() != dim_hilbert_ || d[i].cols() != dim_hilbert_) throw ModelShapeError("derivative has the wrong shape");
    double scale = std::max(1.0, max_abs(d[i]));
    if (hermiticity_defect(d[i]) > herm_tol * scale)
      throw ModelError("derivative " + std::to_string(i + 1) + " is not Hermitian at " + describe(theta));
    d[i] = hermitian_part(d[i]);
    if (std::abs(d[i].trace()) > tol::derivative_trace * scale)
      throw ModelError("derivative " + std::to_string(i + 1) + " is not traceless at " + describe(theta));
    vecs.col(i) = vectorize(d[i]);
  }
  RMat gram = vecs.transpose() * vecs;
  Eigen::JacobiSVD<RMat> svd(gram);
  if (svd.singularValues().minCoeff() <= tol::regularity)
    throw RegularityError("state derivatives are linearly dependent at " + describe(theta));
  return d;
}

StateModel reparametrize(const StateModel& base, Reparametrization map, std::vector<Interval> domain,
                         std::vector<std::string> labels) {
  const int d = base.dim_param();
  const int k = static_cast<int>(domain.size());
  auto to_base = map.to_base;
  auto jac = map.jacobian;
  StateModel::StateFn state = [base, to_base](const RVec& xi) { return base.raw_state(to_base(xi)); };
  StateModel::DerivFn deriv = [base, to_base, jac, d, k](const RVec& xi) {
    RVec theta = to_base(xi);
    std::vector<CMat> db = base.derivatives(theta);
    RMat t = jac(xi);
    if (t.rows() != k || t.cols() != d) throw DimensionError("reparametrization Jacobian has the wrong shape");
    std::vector<CMat> out;
    for (int a = 0; a < t.rows(); ++a) {
      CMat acc = CMat::Zero(db[0].rows(), db[0].cols());
      for (int i = 0; i < d; ++i) acc += t(a, i) * db[i];
      out.push_back(acc);
    }
    return out;
  };
  StateModel::Constraint inside = [base, to_base](const RVec& xi) { return base.in_domain(to_base(xi)); };
  return StateModel(base.dim_hilbert(), k, state, deriv, std::move(domain), std::move(labels), inside, base.fd_step());
}

StateModel fix_trailing_parameters(const StateModel& base, const RVec& theta, int keep) {
  if (keep < 1 || keep > base.dim_param()) throw DimensionError("number of kept parameters is out of range");
  RVec fixed = theta;
  auto embed = [fixed, keep](const RVec& x) {
    RVec full = fixed;
    full.head(keep) = x;
    return full;
  };
  StateModel::StateFn state = [base, embed](const RVec& x) { return base.raw_state(embed(x)); };
  StateModel::DerivFn deriv = [base, embed, keep](const RVec& x) {
    std::vector<CMat> all = base.derivatives(embed(x));
    all.resize(keep);
    return all;
  };
  std::vector<Interval> dom(base.domain().begin(), base.domain().begin() + keep);
  std::vector<std::string> labels(base.labels().begin(), base.labels().begin() + keep);
  StateModel::Constraint inside = [base, embed](const RVec& x) { return base.in_domain(embed(x)); };
  return StateModel(base.dim_hilbert(), keep, state, deriv, dom, labels, inside, base.fd_step());
}

}  // namespace qnuis
