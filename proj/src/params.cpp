#include "drugclip/params.hpp"

#include <cmath>

#include "drugclip/rng.hpp"

namespace drugclip {

void ParameterStore::register_param(const std::string& name, Tensor shape, ParamKind kind) {
  if (entries_.count(name) > 0) {
    throw Error(ErrorKind::UnknownParameter, "parameter registered twice: " + name);
  }
  entries_[name] = Entry{std::move(shape), kind};
}

Tensor& ParameterStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorKind::UnknownParameter, name);
  return it->second.value;
}

const Tensor& ParameterStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorKind::UnknownParameter, name);
  return it->second.value;
}

ParamKind ParameterStore::kind_of(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorKind::UnknownParameter, name);
  return it->second.kind;
}

std::size_t ParameterStore::coordinate_count() const {
  std::size_t n = 0;
  for (const auto& [name, entry] : entries_) n += entry.value.size();
  return n;
}

void glorot_init(ParameterStore& store, std::uint64_t seed) {
  store.set_seed(seed);
  for (auto& [name, entry] : store) {
    Tensor& value = entry.value;
    switch (entry.kind) {
      case ParamKind::Bias:
        value.fill(0.0);
        break;
      case ParamKind::Embedding: {
        Rng rng = named_stream(seed, name);
        for (std::size_t i = 0; i < value.size(); ++i) value[i] = rng.uniform(-0.1, 0.1);
        break;
      }
      case ParamKind::Weight: {
        std::size_t fan_in = value.is_matrix() ? value.cols() : value.size();
        std::size_t fan_out = value.is_matrix() ? value.rows() : 1;
        double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Rng rng = named_stream(seed, name);
        for (std::size_t i = 0; i < value.size(); ++i) value[i] = rng.uniform(-bound, bound);
        break;
      }
    }
  }
}

Var ParamSession::operator[](const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Var v = tape_.push(store_.at(name));
  bound_[name] = v;
  return v;
}

std::map<std::string, Tensor> ParamSession::gradients() const {
  std::map<std::string, Tensor> grads;
  for (const auto& [name, entry] : store_) {
    auto it = bound_.find(name);
    if (it != bound_.end() && tape_.grad_enabled()) {
      grads[name] = tape_.grad(it->second);
    } else {
      grads[name] = entry.value.zeros_like();
    }
  }
  return grads;
}

}  // namespace drugclip
