#include "mtdea/adam.hpp"

#include <cmath>

#include "mtdea/errors.hpp"

namespace mtdea {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

AdamState AdamState::init(std::span<const Tensor* const> params) {
    AdamState st;
    st.first_moment.reserve(params.size());
    st.second_moment.reserve(params.size());
    for (const Tensor* p : params) {
        st.first_moment.push_back(Tensor::zeros(p->shape()));
        st.second_moment.push_back(Tensor::zeros(p->shape()));
    }
    return st;
}

double global_grad_norm(std::span<const Tensor* const> grads) {
    double sq = 0.0;
    for (const Tensor* g : grads)
        for (std::int64_t j = 0; j < g->size(); ++j) {
            const double v = (*g)[j];
            if (!std::isfinite(v)) throw NumericError("non-finite gradient");
            sq += v * v;
        }
    return std::sqrt(sq);
}

double clip_global_norm(std::span<Tensor* const> grads, double max_norm) {
    if (!(max_norm > 0.0)) throw ContractViolation("clip_global_norm: max_norm must be positive");
    const double norm = global_grad_norm({const_cast<const Tensor* const*>(grads.data()), grads.size()});
    if (norm <= max_norm) return 1.0;
    const double s = max_norm / norm;
    for (Tensor* g : grads)
        for (std::int64_t j = 0; j < g->size(); ++j) (*g)[j] *= s;
    return s;
}

double adam_step(std::span<Tensor* const> params, std::span<Tensor* const> grads, AdamState& state,
                 const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size())
        throw ContractViolation("adam_step: parameter/gradient/state count mismatch");
    if (!(cfg.lr > 0.0)) throw ContractViolation("adam_step: lr must be positive");
    if (!(cfg.clip_norm > 0.0)) throw ContractViolation("adam_step: clip_norm must be positive");

    for (std::size_t i = 0; i < params.size(); ++i)
        if (!params[i]->same_shape(*grads[i])) throw ContractViolation("adam_step: gradient shape mismatch");
    double norm = 0.0;
    try {
        norm = global_grad_norm({const_cast<const Tensor* const*>(grads.data()), grads.size()});
    } catch (const NumericError&) {
        throw NumericError("adam_step: non-finite gradient, step aborted");
    }
    const double gscale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;

    state.step += 1;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        Tensor& m = state.first_moment[i];
        Tensor& v = state.second_moment[i];
        for (std::int64_t j = 0; j < p.size(); ++j) {
            const double g = (*grads[i])[j] * gscale;
            m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * g;
            v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * g * g;
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= cfg.lr * cfg.weight_decay * p[j];
            p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + kEps);
        }
    }
    return norm;
}

}  // namespace mtdea
