#include "prd/kernels.hpp"

#include <exception>
#include <span>

namespace prd {
namespace {

std::span<const double> row_of(const Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::span<double> row_of(Matrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

namespace serial {

void column_sums(const Matrix& bids, Vector& prices) {
    prices.resize(bids.cols());
    for (Eigen::Index j = 0; j < bids.cols(); ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < bids.rows(); ++i) total += bids(i, j);
        prices[j] = total;
    }
}

void proportional_allocation(const Matrix& bids, const Vector& prices, Matrix& alloc) {
    alloc.resize(bids.rows(), bids.cols());
    for (Eigen::Index i = 0; i < bids.rows(); ++i)
        for (Eigen::Index j = 0; j < bids.cols(); ++j) alloc(i, j) = bids(i, j) / prices[j];
}

void respond(const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend, Matrix& next) {
    next.resize(alloc.rows(), alloc.cols());
    for (Eigen::Index i = 0; i < alloc.rows(); ++i) {
        auto out = row_of(next, i);
        bid_shares_into(utilities[static_cast<std::size_t>(i)], row_of(alloc, i), out);
        for (double& v : out) v *= spend[i];
    }
}

}  // namespace serial

namespace omp {

void column_sums(const Matrix& bids, Vector& prices) {
    prices.resize(bids.cols());
    const Eigen::Index n = bids.rows();
    const Eigen::Index m = bids.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < m; ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) total += bids(i, j);
        prices[j] = total;
    }
}

void proportional_allocation(const Matrix& bids, const Vector& prices, Matrix& alloc) {
    alloc.resize(bids.rows(), bids.cols());
    const Eigen::Index n = bids.rows();
    const Eigen::Index m = bids.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) alloc(i, j) = bids(i, j) / prices[j];
}

void respond(const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend, Matrix& next) {
    next.resize(alloc.rows(), alloc.cols());
    const Eigen::Index n = alloc.rows();
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            auto out = row_of(next, i);
            bid_shares_into(utilities[static_cast<std::size_t>(i)], row_of(alloc, i), out);
            for (double& v : out) v *= spend[i];
        } catch (...) {
#pragma omp critical(prd_respond_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace omp

void column_sums(Backend backend, const Matrix& bids, Vector& prices) {
    backend == Backend::Serial ? serial::column_sums(bids, prices) : omp::column_sums(bids, prices);
}

void proportional_allocation(Backend backend, const Matrix& bids, const Vector& prices, Matrix& alloc) {
    backend == Backend::Serial ? serial::proportional_allocation(bids, prices, alloc)
                               : omp::proportional_allocation(bids, prices, alloc);
}

void respond(Backend backend, const std::vector<UtilitySpec>& utilities, const Matrix& alloc, const Vector& spend,
             Matrix& next) {
    backend == Backend::Serial ? serial::respond(utilities, alloc, spend, next)
                               : omp::respond(utilities, alloc, spend, next);
}

}  // namespace prd
