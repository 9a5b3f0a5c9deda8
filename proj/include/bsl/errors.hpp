#pragma once

#include <stdexcept>
#include <string>

namespace bsl {

// Base class for all library errors; `code` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define BSL_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    };

BSL_DEFINE_ERROR(DegenerateInterval)
BSL_DEFINE_ERROR(NotInvolution)
BSL_DEFINE_ERROR(HasFixedPoint)
BSL_DEFINE_ERROR(AdjacentPairing)
BSL_DEFINE_ERROR(OddOrShortCycle)
BSL_DEFINE_ERROR(NTooSmall)
BSL_DEFINE_ERROR(NotPermutation)
BSL_DEFINE_ERROR(AmbiguousBranch)
BSL_DEFINE_ERROR(AmbiguousGeometry)
BSL_DEFINE_ERROR(NoSolutionFound)
BSL_DEFINE_ERROR(ValidationFailed)
BSL_DEFINE_ERROR(NotMarkov)
BSL_DEFINE_ERROR(ContainmentViolation)
BSL_DEFINE_ERROR(IndexExhausted)
BSL_DEFINE_ERROR(IntegralInfeasible)
BSL_DEFINE_ERROR(ProfileViolation)
BSL_DEFINE_ERROR(LevelBoundExceeded)
BSL_DEFINE_ERROR(NoCaseApplies)
BSL_DEFINE_ERROR(LevelMarginExceeded)
BSL_DEFINE_ERROR(NotAdmissible)
BSL_DEFINE_ERROR(OrbitClosureIncomplete)
BSL_DEFINE_ERROR(StepBudgetExceeded)
BSL_DEFINE_ERROR(NeutralPointDetected)
BSL_DEFINE_ERROR(BudgetExceeded)
BSL_DEFINE_ERROR(ConfigError)

#undef BSL_DEFINE_ERROR

} // namespace bsl
