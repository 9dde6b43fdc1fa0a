#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace geovad {

using Index = Eigen::Index;

template <class Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Feature sets are stored one sample per row.
template <class Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VecX = VecT<double>;
using MatX = MatT<double>;

}  // namespace geovad
