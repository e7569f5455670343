#include "cuenet/nn/param_store.hpp"

#include <cmath>

#include "cuenet/error.hpp"

namespace cuenet::nn {

Parameter& ParamStore::add(std::string name, Shape shape, bool trainable) {
  if (index_.count(name) > 0) throw UsageError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  Tensor value(shape);
  Tensor grad(std::move(shape));
  entries_.push_back(Parameter{std::move(name), std::move(value), std::move(grad), trainable});
  return entries_.back();
}

bool ParamStore::contains(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

Parameter& ParamStore::at(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UsageError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second];
}

const Parameter& ParamStore::at(std::string_view name) const {
  return const_cast<ParamStore*>(this)->at(name);
}

void ParamStore::zero_grad() {
  for (auto& p : entries_) p.grad.fill(0.0);
}

void ParamStore::set_trainable(bool trainable) {
  for (auto& p : entries_) p.trainable = trainable;
}

std::size_t ParamStore::scalar_count(bool trainable_only) const {
  std::size_t n = 0;
  for (const auto& p : entries_) {
    if (!trainable_only || p.trainable) n += p.value.size();
  }
  return n;
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : entries_) {
    if (!p.trainable) continue;
    for (double g : p.grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

void ParamStore::scale_grads(double factor) {
  for (auto& p : entries_) {
    for (double& g : p.grad.values()) g *= factor;
  }
}

void ParamStore::round_to_float32() {
  for (auto& p : entries_) {
    for (double& v : p.value.values()) v = static_cast<double>(static_cast<float>(v));
  }
}

void ParamStore::copy_values_from(const ParamStore& other) {
  for (const auto& src : other.entries_) {
    auto it = index_.find(src.name);
    if (it == index_.end()) continue;
    auto& dst = entries_[it->second];
    expect_shape(src.value, dst.value.shape(), dst.name.c_str());
    dst.value = src.value;
  }
}

}  // namespace cuenet::nn
