#include "prd/error.hpp"

namespace prd {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonPositiveBudget: return "NonPositiveBudget";
        case Errc::EndowmentNotPartition: return "EndowmentNotPartition";
        case Errc::LazinessOutOfRange: return "LazinessOutOfRange";
        case Errc::UtilityParamInvalid: return "UtilityParamInvalid";
        case Errc::ModeMismatch: return "ModeMismatch";
        case Errc::NonPositiveBundle: return "NonPositiveBundle";
        case Errc::NonPositivePrice: return "NonPositivePrice";
        case Errc::BracketingFailure: return "BracketingFailure";
        case Errc::ToleranceNotReached: return "ToleranceNotReached";
        case Errc::BoundaryBundle: return "BoundaryBundle";
        case Errc::PriceNotDominated: return "PriceNotDominated";
        case Errc::BudgetNotDominated: return "BudgetNotDominated";
        case Errc::NonPositiveBid: return "NonPositiveBid";
        case Errc::UnderflowDetected: return "UnderflowDetected";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NonPositiveEntry: return "NonPositiveEntry";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::NonConsecutiveTrace: return "NonConsecutiveTrace";
        case Errc::InfeasibleAllocation: return "InfeasibleAllocation";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NotConverged: return "NotConverged";
        case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace prd
