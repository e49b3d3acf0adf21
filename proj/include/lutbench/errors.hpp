#pragma once

#include <stdexcept>
#include <string>

namespace lutbench {

/// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorCategory { Config, Data, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), category_(category), kind_(std::move(kind)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorCategory category_;
    std::string kind_;
};

#define LUTBENCH_DEFINE_ERROR(Name, Category)                                   \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& message)                               \
            : Error(ErrorCategory::Category, #Name, message) {}                 \
    }

// numerics
LUTBENCH_DEFINE_ERROR(NotPositiveDefinite, Numerical);
LUTBENCH_DEFINE_ERROR(DimensionMismatch, Data);
LUTBENCH_DEFINE_ERROR(Singular, Numerical);
LUTBENCH_DEFINE_ERROR(NoConvergence, Numerical);

// sampling
LUTBENCH_DEFINE_ERROR(InvalidBounds, Config);
LUTBENCH_DEFINE_ERROR(TooManyDimensions, Config);
LUTBENCH_DEFINE_ERROR(SpecMismatch, Config);

// rtm / store
LUTBENCH_DEFINE_ERROR(NonFiniteInput, Data);
LUTBENCH_DEFINE_ERROR(IoError, Data);
LUTBENCH_DEFINE_ERROR(FormatError, Data);
LUTBENCH_DEFINE_ERROR(VersionError, Data);

// simplex interpolation
LUTBENCH_DEFINE_ERROR(DegenerateInput, Numerical);
LUTBENCH_DEFINE_ERROR(TooFewPoints, Data);
LUTBENCH_DEFINE_ERROR(OutsideHull, Numerical);

// emulator
LUTBENCH_DEFINE_ERROR(RankDeficient, Numerical);
LUTBENCH_DEFINE_ERROR(OptimizationFailed, Numerical);

// metrics
LUTBENCH_DEFINE_ERROR(ShapeMismatch, Data);
LUTBENCH_DEFINE_ERROR(DegenerateRange, Data);
LUTBENCH_DEFINE_ERROR(TooFewSamples, Data);

// bench
LUTBENCH_DEFINE_ERROR(InvalidConfig, Config);

#undef LUTBENCH_DEFINE_ERROR

}  // namespace lutbench
