#include "qnuis/partition.hpp"

#include <cmath>
#include <string>

#include "qnuis/errors.hpp"

namespace qnuis {

Partition::Partition(int d_interest, int d_total) : d_interest_(d_interest), d_total_(d_total) {
  if (d_total < 1) throw DimensionError("parameter dimension must be positive");
  if (d_interest < 1 || d_interest > d_total)
    throw DimensionError("number of interest parameters must lie in [1, " + std::to_string(d_total) + "]");
}

WeightMatrix::WeightMatrix(RMat entries, bool allow_semidefinite)
    : entries_(std::move(entries)), semidefinite_(false) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) throw DimensionError("weight matrix must be square");
  if (!entries_.allFinite()) throw ConfigError("weight matrix has non-finite entries");
  double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("weight matrix is not symmetric");
  entries_ = 0.5 * (entries_ + entries_.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(entries_);
  double lo = es.eigenvalues().minCoeff();
  if (lo <= 1e-14 * scale) {
    if (!allow_semidefinite || lo < -1e-12 * scale) throw ConfigError("weight matrix is not positive definite");
    semidefinite_ = true;
  }
  sqrt_ = sqrt_psd(entries_);
}

}  // namespace qnuis
