#ifndef QNUIS_MEASUREMENT_HPP
#define QNUIS_MEASUREMENT_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qnuis/classical.hpp"
#include "qnuis/model.hpp"
#include "qnuis/partition.hpp"
#include "qnuis/qfisher.hpp"

namespace qnuis {

struct POVM {
  std::vector<CMat> effects;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(effects.size()); }
  int dim() const { return effects.empty() ? 0 : static_cast<int>(effects[0].rows()); }
  // Throws InvalidPOVMError unless every effect is Hermitian PSD and they sum to I.
  void validate() const;
};

POVM make_povm(std::vector<CMat> effects, std::vector<std::string> labels = {});
POVM computational_basis(int d);
// Six outcomes: the +/- eigenprojectors of X, Y, Z, each weighted 1/3.
POVM pauli_povm();
// Qubits: the Pauli POVM.  Otherwise an equal mixture of d + 1 bases (the
// computational one and d fixed Haar-random rotations of it).
POVM default_ic_povm(int d);
POVM random_povm(std::mt19937_64& rng, int d, int outcomes);

struct SpectralPVM {
  POVM pvm;
  RVec eigenvalues;  // one per projector
};
// Spectral projectors of a Hermitian operator, merging eigenvalues closer than `gap`.
SpectralPVM spectral_pvm(const CMat& x, double gap = tol::spectral_gap);

RVec born_distribution(const CMat& rho, const POVM& povm);

// Classical Fisher matrix of the outcome distribution; checks J[Pi] <= J^S.
QFIM classical_fisher_of_povm(const LocalModel& lm, const POVM& povm);

// The finite-outcome model induced by measuring `povm` on every state of
// `model`, restricted to states whose smallest eigenvalue is at least `min_eigenvalue`.
ClassicalModel induced_model(const StateModel& model, const POVM& povm, double min_eigenvalue = tol::positivity);

struct ScalarOptimalMeasurement {
  POVM pvm;
  RVec eigenvalues;
  RVec estimates;       // theta_hat(x) for each outcome
  double variance;      // sum_x p(x) (theta_hat(x) - theta_1)^2
  double target;        // (J^S)^{-1}_{11}
  double fd_residual;   // finite-difference check of local unbiasedness
};

// Measurement in the eigenbasis of the dual SLD operator L^1 and the estimator
// theta_1 + J^{11} times the score along the orthogonalized direction.
ScalarOptimalMeasurement optimal_pvm_scalar(const StateModel& model, const RVec& theta, const Partition& partition);

struct LocalEstimator {
  RVec point;
  RMat values;     // outcomes x d_I: theta_hat_i(x)
  RMat fisher;     // J[Pi]
  RMat partial;    // J(I|N)[Pi]
  RMat covariance; // sum_x p(x) (hat - theta)(hat - theta)^T
};

// theta_i + sum_j (J(I|N)[Pi]^{-1})_{ji} u_j(x | M*) with M* = J_IN J_NN^+.
LocalEstimator locally_unbiased_estimator(const StateModel& model, const RVec& theta, const POVM& povm,
                                          const Partition& partition);

struct PvmIndependence {
  bool independent;           // the optimal PVM is the same at every grid point
  double max_distance;        // largest projector distance from the first grid point
  bool orthogonal_on_grid;    // J^S_{1j} vanishes at every grid point in the given coordinates
  double max_offdiag;
};
PvmIndependence pvm_theta_independence_check(const StateModel& model, const std::vector<RVec>& grid,
                                             const Partition& partition, double tolerance = 1e-8);

enum class Strategy { Repetitive, TwoStep };
enum class EstimatorKind { LocallyUnbiased, MLE };

struct SimulationConfig {
  Strategy strategy = Strategy::Repetitive;
  EstimatorKind estimator = EstimatorKind::LocallyUnbiased;
  long long n_copies = 1000;
  int trials = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<POVM> povm;  // repetitive strategy; defaults to the computational basis
  // Two-step: ceil(n^first_stage_exponent) copies on the IC POVM, then
  // `refinements` batches of ceil(n^refinement_exponent) copies on the optimal
  // PVM (each re-centering the pilot), then the rest on the optimal PVM.
  double first_stage_exponent = 0.6;
  int refinements = 1;
  double refinement_exponent = 0.8;
  double pilot_min_eigenvalue = 1e-4;  // keeps the pilot estimate away from pure states
};

struct SimulationResult {
  std::string model;
  std::string strategy;
  std::string estimator;
  RVec truth;
  int d_interest = 0;
  long long n_copies = 0;
  long long first_stage_copies = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  RMat mse;          // d_I x d_I empirical mean of (hat - truth)(hat - truth)^T
  RMat scaled_mse;   // n * mse
  RVec bias;
  RMat target;       // asymptotic target for n * mse
  double relative_error = 0.0;  // |Tr scaled_mse - Tr target| / Tr target
  int boundary_trials = 0;
  std::vector<RVec> estimates;
};

SimulationResult simulate(const StateModel& model, const RVec& theta, const Partition& partition,
                          const SimulationConfig& config, const std::string& model_name = "");

// Stream for one trial, a deterministic function of (seed, trial) only.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial);
RVec sample_counts(std::mt19937_64& rng, const RVec& probabilities, long long n);

}  // namespace qnuis

#endif
