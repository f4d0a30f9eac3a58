#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prd {

enum class Errc {
    NonPositiveBudget,
    EndowmentNotPartition,
    LazinessOutOfRange,
    UtilityParamInvalid,
    ModeMismatch,
    NonPositiveBundle,
    NonPositivePrice,
    BracketingFailure,
    ToleranceNotReached,
    BoundaryBundle,
    PriceNotDominated,
    BudgetNotDominated,
    NonPositiveBid,
    UnderflowDetected,
    LengthMismatch,
    NonPositiveEntry,
    ShapeMismatch,
    NonConsecutiveTrace,
    InfeasibleAllocation,
    InvalidArgument,
    NotConverged,
    ParseError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace prd
