#pragma once

#include <Eigen/Core>

#include "cuenet/nn/tensor.hpp"

namespace cuenet::nn::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Rank-1 tensors view as a single row.
inline MatrixMap mat(Tensor& t) {
  const auto r = t.rank() == 1 ? 1 : t.dim(0);
  return MatrixMap(t.data(), static_cast<Eigen::Index>(r),
                   static_cast<Eigen::Index>(t.size() / r));
}
inline ConstMatrixMap mat(const Tensor& t) {
  const auto r = t.rank() == 1 ? 1 : t.dim(0);
  return ConstMatrixMap(t.data(), static_cast<Eigen::Index>(r),
                        static_cast<Eigen::Index>(t.size() / r));
}
inline VectorMap vec(Tensor& t) {
  return VectorMap(t.data(), static_cast<Eigen::Index>(t.size()));
}
inline ConstVectorMap vec(const Tensor& t) {
  return ConstVectorMap(t.data(), static_cast<Eigen::Index>(t.size()));
}

}  // namespace cuenet::nn::detail
