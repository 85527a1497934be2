#pragma once

#include <stdexcept>
#include <string>

namespace zerocorr {

/// Base of every numeric failure raised by the library. `kind()` names the
/// failure class (e.g. "NearSingular") so front ends can report it verbatim.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ZEROCORR_DEFINE_ERROR(Name)                                        \
    class Name : public NumericError {                                     \
    public:                                                                \
        explicit Name(const std::string& what) : NumericError(#Name, what) {} \
    };

ZEROCORR_DEFINE_ERROR(NotPositiveDefinite)
ZEROCORR_DEFINE_ERROR(NearSingular)
ZEROCORR_DEFINE_ERROR(SizeLimitExceeded)
ZEROCORR_DEFINE_ERROR(DomainError)
ZEROCORR_DEFINE_ERROR(MissingSubset)
ZEROCORR_DEFINE_ERROR(WindowTooLarge)
ZEROCORR_DEFINE_ERROR(InsufficientDegree)
ZEROCORR_DEFINE_ERROR(RootFindingFailed)
ZEROCORR_DEFINE_ERROR(InvalidArgument)

#undef ZEROCORR_DEFINE_ERROR

}  // namespace zerocorr
