#pragma once

#include <cstddef>

#include "cuenet/nn/tensor.hpp"

namespace cuenet::nn {

/// Softmax cross-entropy of a logit vector against class `target`, computed
/// through log-sum-exp so large logits do not overflow. When `dlogits` is
/// given it receives softmax(logits) - onehot(target).
double cross_entropy(const Tensor& logits, std::size_t target, Tensor* dlogits = nullptr);

Tensor softmax(const Tensor& logits);
double log_sum_exp(const Tensor& logits);

}  // namespace cuenet::nn
