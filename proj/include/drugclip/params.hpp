#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "drugclip/autodiff.hpp"
#include "drugclip/tensor.hpp"

namespace drugclip {

// Initialization class of a parameter: Glorot-uniform weights, zero biases,
// small-uniform embedding tables.
enum class ParamKind { Weight, Bias, Embedding };

class ParameterStore {
 public:
  struct Entry {
    Tensor value;
    ParamKind kind = ParamKind::Weight;
  };

  void register_param(const std::string& name, Tensor shape, ParamKind kind);

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  ParamKind kind_of(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t coordinate_count() const;

  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // ordered by name, so every iteration-dependent computation is deterministic
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

 private:
  std::map<std::string, Entry> entries_;
  std::uint64_t seed_ = 0;
};

// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero, embeddings
// uniform in +-0.1. Each parameter draws from its own named stream, so values
// do not depend on registration order.
void glorot_init(ParameterStore& store, std::uint64_t seed);

// Binds a ParameterStore to a tape for one forward/backward pass: parameters
// become leaf nodes on first use, and gradients() collects d(loss)/d(param)
// after backward (zeros for parameters the loss never touched).
class ParamSession {
 public:
  ParamSession(Tape& tape, const ParameterStore& store) : tape_(tape), store_(store) {}

  Var operator[](const std::string& name);

  std::map<std::string, Tensor> gradients() const;

  Tape& tape() { return tape_; }
  const ParameterStore& store() const { return store_; }

 private:
  Tape& tape_;
  const ParameterStore& store_;
  std::map<std::string, Var> bound_;
};

}  // namespace drugclip
