#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuenet/nn/tensor.hpp"

namespace cuenet::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  /// Frozen entries keep their value: optimizers skip them.
  bool trainable = true;
};

/// Named parameters in insertion order, each with a gradient slot of the
/// same shape.
class ParamStore {
 public:
  Parameter& add(std::string name, Shape shape, bool trainable = true);

  bool contains(std::string_view name) const;
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  Tensor& value(std::string_view name) { return at(name).value; }
  const Tensor& value(std::string_view name) const { return at(name).value; }
  Tensor& grad(std::string_view name) { return at(name).grad; }

  std::vector<Parameter>& entries() { return entries_; }
  const std::vector<Parameter>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void zero_grad();
  void set_trainable(bool trainable);
  /// Number of scalar values, optionally only over trainable entries.
  std::size_t scalar_count(bool trainable_only = false) const;
  /// L2 norm of the gradients of trainable entries.
  double grad_norm() const;
  void scale_grads(double factor);
  /// Rounds every value to the nearest binary32, the checkpoint precision.
  void round_to_float32();
  /// Copies values (not grads) of every entry `other` shares by name.
  void copy_values_from(const ParamStore& other);

 private:
  std::vector<Parameter> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cuenet::nn
