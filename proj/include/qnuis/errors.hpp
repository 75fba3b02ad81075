#ifndef QNUIS_ERRORS_HPP
#define QNUIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnuis {

// Input errors map to CLI exit code 2, numerical failures to exit code 3.
enum class ErrorCategory { Input, Numerical };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ErrorCategory category() const = 0;
  virtual const char* kind() const = 0;
};

#define QNUIS_DEFINE_ERROR(Name, Category)                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    using Error::Error;                                                      \
    ErrorCategory category() const override { return ErrorCategory::Category; } \
    const char* kind() const override { return #Name; }                      \
  };

QNUIS_DEFINE_ERROR(DomainError, Input)
QNUIS_DEFINE_ERROR(ModelError, Input)
QNUIS_DEFINE_ERROR(ConfigError, Input)
QNUIS_DEFINE_ERROR(DimensionError, Input)
QNUIS_DEFINE_ERROR(ModelShapeError, Input)
QNUIS_DEFINE_ERROR(InvalidPOVMError, Input)
QNUIS_DEFINE_ERROR(RankError, Input)

QNUIS_DEFINE_ERROR(RegularityError, Numerical)
QNUIS_DEFINE_ERROR(SingularStateError, Numerical)
QNUIS_DEFINE_ERROR(SingularQFIMError, Numerical)
QNUIS_DEFINE_ERROR(StepError, Numerical)
QNUIS_DEFINE_ERROR(ConsistencyError, Numerical)
QNUIS_DEFINE_ERROR(OptimizerError, Numerical)
QNUIS_DEFINE_ERROR(InfeasibleError, Numerical)
QNUIS_DEFINE_ERROR(SingularOutcomeError, Numerical)
QNUIS_DEFINE_ERROR(ConvergenceError, Numerical)
QNUIS_DEFINE_ERROR(DegenerateSpectrumError, Numerical)

#undef QNUIS_DEFINE_ERROR

}  // namespace qnuis

#endif
