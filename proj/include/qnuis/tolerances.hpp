#ifndef QNUIS_TOLERANCES_HPP
#define QNUIS_TOLERANCES_HPP

namespace qnuis::tol {

inline constexpr double fd_step = 1e-5;
inline constexpr double hermiticity = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double fd_hermiticity = 1e-8;
inline constexpr double derivative_trace = 1e-10;
inline constexpr double positivity = 1e-10;
inline constexpr double regularity = 1e-8;
inline constexpr double max_condition = 1e12;
inline constexpr double ode = 1e-6;
inline constexpr double opt = 1e-6;
inline constexpr double closed_form = 1e-4;
inline constexpr double classification = 1e-7;
inline constexpr double prob_floor = 1e-12;
inline constexpr double pinv_cutoff = 1e-10;
inline constexpr double spectral_gap = 1e-10;
inline constexpr double povm_completeness = 1e-10;
inline constexpr double fisher_dominance = 1e-8;
inline constexpr double mle_gradient = 1e-9;
inline constexpr int mle_max_iterations = 200;

}  // namespace qnuis::tol

#endif
