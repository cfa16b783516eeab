#pragma once

#include <functional>

#include "alphagan/tensor.hpp"

namespace alphagan {

/// A differentiable scalar-valued function of one tensor. The callable must
/// be deterministic and build its result from primitive ops so it can run
/// both on and off tape.
using ScalarFn = std::function<Tensor(const Tensor&)>;

/// Compares the tape gradient of `f` at `point` against central finite
/// differences with the given step. Returns the max over coordinates of
/// |analytic - numeric| / max(1, |analytic|, |numeric|).
double grad_check(const ScalarFn& f, const Tensor& point, double step = 1e-5);

}  // namespace alphagan
