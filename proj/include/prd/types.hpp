#pragma once

#include <Eigen/Dense>

namespace prd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dynamic state of one round. Rows are agents, columns goods.
using PriceVector = Vector;  // currency per unit of good
using BidMatrix = Matrix;    // b_ij, currency
using Allocation = Matrix;   // x_ij, units of good (unit supply per good)

}  // namespace prd
