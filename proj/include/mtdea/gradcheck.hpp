#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mtdea/tensor.hpp"

namespace mtdea {

/// Central finite-difference verification of reverse-mode gradients.
///
/// `eval` recomputes the scalar objective from the current parameter values
/// (it must be deterministic: fix all RNG seeds before probing). `grad`
/// returns the autodiff gradient per parameter, aligned with `params`.
/// Returns max over all parameter entries of
///   |autodiff - central_difference| / max(1, |central_difference|).
/// Parameters are restored bit-exactly after probing.
double finite_diff_check(const std::function<double()>& eval, const std::function<std::vector<Tensor>()>& grad,
                         std::span<Tensor* const> params, double step);

}  // namespace mtdea
