#include "crest/adam.hpp"

#include <cmath>
#include <string>

namespace crest {

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, double weight_decay) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size())
        throw ShapeError("adam_step: size mismatch params=" +
                         std::to_string(params.size()) + " grads=" +
                         std::to_string(grads.size()) + " state=" +
                         std::to_string(state.m.size()));
    if (!(lr > 0.0) && lr != 0.0)
        throw ArgumentError("adam_step: lr must be >= 0, got " + std::to_string(lr));

    for (size_t i = 0; i < grads.size(); ++i)
        if (!std::isfinite(grads[i]))
            throw NumericError("adam_step: non-finite gradient at index " +
                               std::to_string(i) + "; update rejected");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + 2.0 * weight_decay * params[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace crest
