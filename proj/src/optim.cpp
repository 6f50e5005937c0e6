#include "drugclip/optim.hpp"

#include <cmath>

namespace drugclip {

void adam_step(ParameterStore& params, const std::map<std::string, Tensor>& grads,
               AdamState& state, const AdamConfig& config) {
  for (const auto& [name, entry] : params) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      throw Error(ErrorKind::ShapeMismatch, "missing gradient for parameter " + name);
    }
    if (!it->second.same_shape(entry.value)) {
      throw Error(ErrorKind::ShapeMismatch, "gradient shape mismatch for parameter " + name);
    }
  }

  state.step += 1;
  double t = static_cast<double>(state.step);
  double bc1 = 1.0 - std::pow(config.beta1, t);
  double bc2 = 1.0 - std::pow(config.beta2, t);

  for (auto& [name, entry] : params) {
    const Tensor& g = grads.at(name);
    Tensor& m = state.first_moment.try_emplace(name, entry.value.zeros_like()).first->second;
    Tensor& v = state.second_moment.try_emplace(name, entry.value.zeros_like()).first->second;
    Tensor& p = entry.value;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      double m_hat = m[i] / bc1;
      double v_hat = v[i] / bc2;
      p[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

}  // namespace drugclip
