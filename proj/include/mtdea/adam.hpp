#pragma once

#include <span>
#include <vector>

#include "mtdea/tensor.hpp"

namespace mtdea {

/// Adam moment accumulators, one pair per parameter tensor, plus the step
/// counter. Constants beta1=0.9, beta2=0.999, eps=1e-8.
struct AdamState {
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    long step = 0;

    static AdamState init(std::span<const Tensor* const> params);
};

struct AdamConfig {
    double lr = 1e-3;
    double weight_decay = 0.0;
    double clip_norm = 1.0;  // global gradient norm bound
};

/// Euclidean norm over all entries of all tensors.
double global_grad_norm(std::span<const Tensor* const> grads);

/// Scales grads in place so their global norm is at most max_norm; returns the
/// applied scale (1 when already within the bound). Direction is preserved:
/// the result is a nonnegative multiple of the input.
double clip_global_norm(std::span<Tensor* const> grads, double max_norm);

/// Returns the pre-clip global gradient norm. Clips the gradient globally to
/// clip_norm, applies decoupled (multiplicative) weight decay, then the Adam
/// update. A non-finite gradient aborts the step before any mutation.
double adam_step(std::span<Tensor* const> params, std::span<Tensor* const> grads, AdamState& state,
                 const AdamConfig& cfg);

}  // namespace mtdea
