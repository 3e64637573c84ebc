#pragma once

#include <Eigen/Dense>

namespace rcn {

//! Point sets are stored one example per row.
template <typename Scalar = double>
using Matrix =
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

//! Binary labels, each entry -1 or +1.
using Labels = Eigen::VectorXi;

using Index = Eigen::Index;

} // namespace rcn
