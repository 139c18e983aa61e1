#pragma once

#include "crest/rng.hpp"
#include "crest/tensor.hpp"

namespace crest {

// Stride-1 multi-channel 2-D convolution layer. The sliding window is a
// plain dot product (cross-correlation, no kernel flip); padding is zeros.
// Odd kernel dims with pad = (k-1)/2 give same-size output.
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kh = 0;
    int kw = 0;
    int pad_h = 0;
    int pad_w = 0;
    std::vector<double> weights;  // [oc][ic][ky][kx]
    std::vector<double> bias;     // [oc]

    ConvLayer() = default;

    // Same-padding layer; kh/kw must be odd so the filter centers.
    ConvLayer(int in_c, int out_c, int kh_, int kw_)
        : in_channels(in_c), out_channels(out_c), kh(kh_), kw(kw_),
          pad_h((kh_ - 1) / 2), pad_w((kw_ - 1) / 2) {
        if (in_c <= 0 || out_c <= 0 || kh_ <= 0 || kw_ <= 0)
            throw ArgumentError("ConvLayer: non-positive dims");
        if (kh_ % 2 == 0 || kw_ % 2 == 0)
            throw ArgumentError("ConvLayer: kernel dims must be odd, got " +
                                std::to_string(kh_) + "x" + std::to_string(kw_));
        weights.assign(static_cast<size_t>(out_c) * in_c * kh_ * kw_, 0.0);
        bias.assign(out_c, 0.0);
    }

    size_t weight_count() const { return weights.size(); }

    double& w(int oc, int ic, int ky, int kx) {
        return weights[((static_cast<size_t>(oc) * in_channels + ic) * kh + ky) * kw + kx];
    }
    double w(int oc, int ic, int ky, int kx) const {
        return weights[((static_cast<size_t>(oc) * in_channels + ic) * kh + ky) * kw + kx];
    }

    int out_height(int in_h) const { return in_h + 2 * pad_h - kh + 1; }
    int out_width(int in_w) const { return in_w + 2 * pad_w - kw + 1; }

    void init_gaussian(Rng& rng, double stddev) {
        for (double& v : weights) v = rng.normal(0.0, stddev);
        for (double& v : bias) v = rng.normal(0.0, stddev);
    }
};

struct ConvGrads {
    Tensor3 input;                // d loss / d input
    std::vector<double> weights;  // d loss / d layer.weights
    std::vector<double> bias;     // d loss / d layer.bias
};

// OpenMP-parallel kernels. Each output element is accumulated by exactly one
// thread in a fixed (ic, ky, kx) order, so results are bit-identical for any
// thread count and match the serial reference exactly.
Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer);
ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer,
                          const Tensor3& grad_output);

Tensor3 relu_forward(const Tensor3& input);
Tensor3 relu_backward(const Tensor3& input, const Tensor3& grad_output);

// Sum of squared differences and its gradient wrt pred.
struct L2Loss {
    double value = 0.0;
    Tensor3 grad_pred;
};
L2Loss l2_loss(const Tensor3& pred, const Tensor3& target);

namespace serial {

// Plain-loop reference implementations kept for tests and the kernel
// benchmark. Same accumulation order per output element as the parallel
// kernels above.
Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer);
ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer,
                          const Tensor3& grad_output);

}  // namespace serial

}  // namespace crest
