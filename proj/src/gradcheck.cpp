#include "drugclip/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace drugclip {

namespace {

double loss_value(const LossBuilder& loss_fn, const ParameterStore& params) {
  Tape tape(/*grad_enabled=*/false);
  ParamSession session(tape, params);
  Var loss = loss_fn(tape, session);
  return tape.value(loss).scalar_value();
}

}  // namespace

double check_gradients(const LossBuilder& loss_fn, ParameterStore& params, double epsilon) {
  std::map<std::string, Tensor> analytic;
  {
    Tape tape;
    ParamSession session(tape, params);
    Var loss = loss_fn(tape, session);
    tape.backward(loss);
    analytic = session.gradients();
  }

  double worst = 0.0;
  for (auto& [name, entry] : params) {
    Tensor& value = entry.value;
    const Tensor& a = analytic.at(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      double saved = value[i];
      value[i] = saved + epsilon;
      double up = loss_value(loss_fn, params);
      value[i] = saved - epsilon;
      double down = loss_value(loss_fn, params);
      value[i] = saved;
      double numeric = (up - down) / (2.0 * epsilon);
      double err = std::abs(a[i] - numeric) / std::max(1e-8, std::abs(a[i]) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace drugclip
