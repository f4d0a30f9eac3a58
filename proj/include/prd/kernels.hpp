#pragma once

#include <vector>

#include "prd/types.hpp"
#include "prd/utility.hpp"

// Data-parallel pieces of one proportional-response round. The serial versions are
// the reference; the OpenMP versions keep the same per-entry summation order and
// therefore produce bit-identical results.
namespace prd {

enum class Backend { Serial, OpenMP };

namespace serial {

/// p_j = sum_i b_ij
void column_sums(const Matrix& bids, Vector& prices);
/// x_ij = b_ij / p_j
void proportional_allocation(const Matrix& bids, const Vector& prices, Matrix& alloc);
/// next_i = spend_i * bid_shares(u_i, x_i)
void respond(const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend, Matrix& next);

}  // namespace serial

namespace omp {

void column_sums(const Matrix& bids, Vector& prices);
void proportional_allocation(const Matrix& bids, const Vector& prices, Matrix& alloc);
void respond(const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend, Matrix& next);

}  // namespace omp

void column_sums(Backend backend, const Matrix& bids, Vector& prices);
void proportional_allocation(Backend backend, const Matrix& bids, const Vector& prices, Matrix& alloc);
void respond(Backend backend, const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend,
             Matrix& next);

}  // namespace prd
