#pragma once

#include <functional>

#include "drugclip/autodiff.hpp"
#include "drugclip/params.hpp"

namespace drugclip {

// Builds the scalar loss for the current parameter values. Must be
// deterministic: called once for the analytic pass and 2x per coordinate for
// the central-difference pass.
using LossBuilder = std::function<Var(Tape&, ParamSession&)>;

// Max over all parameter coordinates of |analytic - numeric| /
// max(1e-8, |analytic| + |numeric|), with numeric = (L(p+eps) - L(p-eps)) / 2eps.
double check_gradients(const LossBuilder& loss_fn, ParameterStore& params, double epsilon);

}  // namespace drugclip
