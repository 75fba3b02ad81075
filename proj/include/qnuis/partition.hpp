#ifndef QNUIS_PARTITION_HPP
#define QNUIS_PARTITION_HPP

#include "qnuis/linalg.hpp"

namespace qnuis {

// The first d_interest coordinates are parameters of interest, the rest nuisance.
class Partition {
 public:
  Partition(int d_interest, int d_total);
  static Partition full(int d_total) { return Partition(d_total, d_total); }

  int d_interest() const { return d_interest_; }
  int d_total() const { return d_total_; }
  int d_nuisance() const { return d_total_ - d_interest_; }
  bool has_nuisance() const { return d_total_ > d_interest_; }

 private:
  int d_interest_;
  int d_total_;
};

// Symmetric positive definite weight (positive semidefinite when allowed).
class WeightMatrix {
 public:
  explicit WeightMatrix(RMat entries, bool allow_semidefinite = false);
  static WeightMatrix identity(int k) { return WeightMatrix(RMat::Identity(k, k)); }

  const RMat& entries() const { return entries_; }
  const RMat& sqrt() const { return sqrt_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  bool semidefinite() const { return semidefinite_; }

 private:
  RMat entries_;
  RMat sqrt_;
  bool semidefinite_;
};

}  // namespace qnuis

#endif
