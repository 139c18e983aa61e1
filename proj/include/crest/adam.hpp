#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crest/error.hpp"

namespace crest {

// Per-parameter-tensor Adam accumulators.
struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard Adam update with bias correction. Weight decay enters the
// gradient as 2 * weight_decay * param before moment accumulation.
// Rejects non-finite gradients (params and state untouched).
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr, double weight_decay = 0.0);

}  // namespace crest
