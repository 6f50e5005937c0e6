#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "drugclip/params.hpp"
#include "drugclip/tensor.hpp"

namespace drugclip {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::int64_t step = 0;
  std::map<std::string, Tensor> first_moment;
  std::map<std::string, Tensor> second_moment;
};

// One adaptive-moment update with bias correction over every parameter in the
// store. `grads` must carry a same-shaped gradient for each parameter.
void adam_step(ParameterStore& params, const std::map<std::string, Tensor>& grads,
               AdamState& state, const AdamConfig& config = {});

}  // namespace drugclip
