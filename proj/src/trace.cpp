#include "prd/trace.hpp"

#include "prd/error.hpp"

namespace prd {

std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::PriceTolerance: return "price_tol";
        case StopReason::AllocationTolerance: return "alloc_tol";
        case StopReason::MaxIters: return "max_iters";
    }
    return "unknown";
}

StopRule::StopRule(std::size_t max_iters_, double price_tol_) : max_iters(max_iters_), price_tol(price_tol_) {
    if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be at least 1");
    if (!(price_tol >= 0.0)) throw Error(Errc::InvalidArgument, "price_tol must be nonnegative");
}

bool DynamicsTrace::consecutive() const {
    for (std::size_t k = 0; k < records.size(); ++k)
        if (records[k].iteration != k) return false;
    return true;
}

}  // namespace prd
