#pragma once

#include <stdexcept>
#include <string>

namespace ggc {

/// Base class for all toolkit errors. `code()` is a stable machine-readable
/// tag used by the CLI's json error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define GGC_DEFINE_ERROR(Name)                              \
  class Name : public Error {                               \
   public:                                                  \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

GGC_DEFINE_ERROR(NotHermitian);
GGC_DEFINE_ERROR(Disconnected);
GGC_DEFINE_ERROR(NotReversible);
GGC_DEFINE_ERROR(NotIrreducible);
GGC_DEFINE_ERROR(CrossComponent);
GGC_DEFINE_ERROR(OverlappingSupport);
GGC_DEFINE_ERROR(DimensionMismatch);
GGC_DEFINE_ERROR(InfeasibleInput);
GGC_DEFINE_ERROR(SingularScaling);
GGC_DEFINE_ERROR(InvalidWitness);
GGC_DEFINE_ERROR(FractionMismatch);
GGC_DEFINE_ERROR(ScheduleMismatch);
GGC_DEFINE_ERROR(NotOrthogonal);
GGC_DEFINE_ERROR(NumericalFailure);
GGC_DEFINE_ERROR(InvalidInstance);
GGC_DEFINE_ERROR(NotCut);
GGC_DEFINE_ERROR(UnsupportedShape);
GGC_DEFINE_ERROR(NotConnected);
GGC_DEFINE_ERROR(OutputMismatch);
GGC_DEFINE_ERROR(InvalidColoring);
GGC_DEFINE_ERROR(NoConvergence);
GGC_DEFINE_ERROR(InvalidScheme);
GGC_DEFINE_ERROR(SupportViolation);
GGC_DEFINE_ERROR(NotNormalized);
GGC_DEFINE_ERROR(NotUnique);
GGC_DEFINE_ERROR(NotDistinct);
GGC_DEFINE_ERROR(AllZeroInput);
GGC_DEFINE_ERROR(ParseError);

#undef GGC_DEFINE_ERROR

}  // namespace ggc
