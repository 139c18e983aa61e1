#include "crest/conv.hpp"

#include <algorithm>

namespace crest {

namespace {

void check_forward_shapes(const Tensor3& input, const ConvLayer& layer) {
    if (input.channels != layer.in_channels)
        throw ShapeError("conv2d_forward: input channels " +
                         std::to_string(input.channels) + " != layer in_channels " +
                         std::to_string(layer.in_channels) + " (input " +
                         input.shape_str() + ", filters " +
                         std::to_string(layer.out_channels) + "x" +
                         std::to_string(layer.in_channels) + "x" +
                         std::to_string(layer.kh) + "x" + std::to_string(layer.kw) + ")");
    if (layer.out_height(input.height) <= 0 || layer.out_width(input.width) <= 0)
        throw ShapeError("conv2d_forward: kernel " + std::to_string(layer.kh) + "x" +
                         std::to_string(layer.kw) + " too large for input " +
                         input.shape_str());
}

// One output row: out[ox] = bias + sum over (ic, ky, kx) of w * in.
// Zero padding is realized by clipping the (ky, kx) ranges; the inner kx/ox
// loop runs over a contiguous span so it vectorizes.
void forward_row(const Tensor3& input, const ConvLayer& layer, int oc, int oy,
                 double* out_row) {
    const int W = input.width;
    const int H = input.height;
    const int ow = layer.out_width(W);
    for (int ox = 0; ox < ow; ++ox) out_row[ox] = layer.bias[oc];
    for (int ic = 0; ic < layer.in_channels; ++ic) {
        const double* in_ch = input.channel(ic);
        for (int ky = 0; ky < layer.kh; ++ky) {
            const int iy = oy + ky - layer.pad_h;
            if (iy < 0 || iy >= H) continue;
            const double* in_row = in_ch + static_cast<size_t>(iy) * W;
            for (int kx = 0; kx < layer.kw; ++kx) {
                const double wv = layer.w(oc, ic, ky, kx);
                const int shift = kx - layer.pad_w;
                const int lo = std::max(0, -shift);
                const int hi = std::min(ow, W - shift);
                for (int ox = lo; ox < hi; ++ox)
                    out_row[ox] += wv * in_row[ox + shift];
            }
        }
    }
}

}  // namespace

Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer) {
    check_forward_shapes(input, layer);
    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    Tensor3 out(layer.out_channels, oh, ow);

#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < layer.out_channels; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            forward_row(input, layer, oc, oy,
                        out.channel(oc) + static_cast<size_t>(oy) * ow);
    return out;
}

ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer,
                          const Tensor3& grad_output) {
    check_forward_shapes(input, layer);
    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    if (grad_output.channels != layer.out_channels || grad_output.height != oh ||
        grad_output.width != ow)
        throw ShapeError("conv2d_backward: grad_output " + grad_output.shape_str() +
                         " != forward output " + std::to_string(layer.out_channels) +
                         "x" + std::to_string(oh) + "x" + std::to_string(ow));

    ConvGrads g;
    g.input = Tensor3(input.channels, input.height, input.width);
    g.weights.assign(layer.weights.size(), 0.0);
    g.bias.assign(layer.bias.size(), 0.0);

    const int H = input.height;
    const int W = input.width;

    // grad_bias[oc] = sum of grad_output channel oc.
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < layer.out_channels; ++oc) {
        const double* go = grad_output.channel(oc);
        double acc = 0.0;
        for (size_t i = 0; i < static_cast<size_t>(oh) * ow; ++i) acc += go[i];
        g.bias[oc] = acc;
    }

    // grad_weights[oc,ic,ky,kx] = sum over (oy, ox) of go * in. Gather form:
    // every filter tap is owned by one thread.
#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < layer.out_channels; ++oc)
        for (int ic = 0; ic < layer.in_channels; ++ic) {
            const double* go = grad_output.channel(oc);
            const double* in_ch = input.channel(ic);
            for (int ky = 0; ky < layer.kh; ++ky)
                for (int kx = 0; kx < layer.kw; ++kx) {
                    double acc = 0.0;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy + ky - layer.pad_h;
                        if (iy < 0 || iy >= H) continue;
                        const double* go_row = go + static_cast<size_t>(oy) * ow;
                        const double* in_row = in_ch + static_cast<size_t>(iy) * W;
                        const int shift = kx - layer.pad_w;
                        const int lo = std::max(0, -shift);
                        const int hi = std::min(ow, W - shift);
                        for (int ox = lo; ox < hi; ++ox)
                            acc += go_row[ox] * in_row[ox + shift];
                    }
                    g.weights[((static_cast<size_t>(oc) * layer.in_channels + ic) *
                                   layer.kh + ky) * layer.kw + kx] = acc;
                }
        }

    // grad_input[ic,iy,ix] = sum over (oc, ky, kx) of w * go[oc, iy-ky+ph, ix-kx+pw].
    // Gather form again: fixed (oc, ky, kx) order per input element.
#pragma omp parallel for collapse(2) schedule(static)
    for (int ic = 0; ic < input.channels; ++ic)
        for (int iy = 0; iy < H; ++iy) {
            double* gi_row = g.input.channel(ic) + static_cast<size_t>(iy) * W;
            for (int oc = 0; oc < layer.out_channels; ++oc) {
                const double* go = grad_output.channel(oc);
                for (int ky = 0; ky < layer.kh; ++ky) {
                    const int oy = iy - ky + layer.pad_h;
                    if (oy < 0 || oy >= oh) continue;
                    const double* go_row = go + static_cast<size_t>(oy) * ow;
                    for (int kx = 0; kx < layer.kw; ++kx) {
                        const double wv = layer.w(oc, ic, ky, kx);
                        const int shift = layer.pad_w - kx;  // ox = ix + shift
                        const int lo = std::max(0, -shift);
                        const int hi = std::min(W, ow - shift);
                        for (int ix = lo; ix < hi; ++ix)
                            gi_row[ix] += wv * go_row[ix + shift];
                    }
                }
            }
        }

    return g;
}

Tensor3 relu_forward(const Tensor3& input) {
    Tensor3 out = input;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor3 relu_backward(const Tensor3& input, const Tensor3& grad_output) {
    require_same_shape(input, grad_output, "relu_backward");
    Tensor3 out(input.channels, input.height, input.width);
    // Tie at exactly 0 passes no gradient.
    for (size_t i = 0; i < input.data.size(); ++i)
        out.data[i] = input.data[i] > 0.0 ? grad_output.data[i] : 0.0;
    return out;
}

L2Loss l2_loss(const Tensor3& pred, const Tensor3& target) {
    require_same_shape(pred, target, "l2_loss");
    L2Loss r;
    r.grad_pred = Tensor3(pred.channels, pred.height, pred.width);
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        r.value += d * d;
        r.grad_pred.data[i] = 2.0 * d;
    }
    return r;
}

namespace serial {

Tensor3 conv2d_forward(const Tensor3& input, const ConvLayer& layer) {
    check_forward_shapes(input, layer);
    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    Tensor3 out(layer.out_channels, oh, ow);
    for (int oc = 0; oc < layer.out_channels; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = layer.bias[oc];
                for (int ic = 0; ic < layer.in_channels; ++ic)
                    for (int ky = 0; ky < layer.kh; ++ky)
                        for (int kx = 0; kx < layer.kw; ++kx) {
                            const int iy = oy + ky - layer.pad_h;
                            const int ix = ox + kx - layer.pad_w;
                            if (iy < 0 || iy >= input.height || ix < 0 ||
                                ix >= input.width)
                                continue;  // zero padding
                            acc += layer.w(oc, ic, ky, kx) * input.at(ic, iy, ix);
                        }
                out.at(oc, oy, ox) = acc;
            }
    return out;
}

ConvGrads conv2d_backward(const Tensor3& input, const ConvLayer& layer,
                          const Tensor3& grad_output) {
    check_forward_shapes(input, layer);
    const int oh = layer.out_height(input.height);
    const int ow = layer.out_width(input.width);
    if (grad_output.channels != layer.out_channels || grad_output.height != oh ||
        grad_output.width != ow)
        throw ShapeError("conv2d_backward: grad_output " + grad_output.shape_str() +
                         " != forward output shape");

    ConvGrads g;
    g.input = Tensor3(input.channels, input.height, input.width);
    g.weights.assign(layer.weights.size(), 0.0);
    g.bias.assign(layer.bias.size(), 0.0);

    for (int oc = 0; oc < layer.out_channels; ++oc) {
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) g.bias[oc] += grad_output.at(oc, oy, ox);

        for (int ic = 0; ic < layer.in_channels; ++ic)
            for (int ky = 0; ky < layer.kh; ++ky)
                for (int kx = 0; kx < layer.kw; ++kx) {
                    double acc = 0.0;
                    for (int oy = 0; oy < oh; ++oy)
                        for (int ox = 0; ox < ow; ++ox) {
                            const int iy = oy + ky - layer.pad_h;
                            const int ix = ox + kx - layer.pad_w;
                            if (iy < 0 || iy >= input.height || ix < 0 ||
                                ix >= input.width)
                                continue;
                            acc += grad_output.at(oc, oy, ox) * input.at(ic, iy, ix);
                        }
                    g.weights[((static_cast<size_t>(oc) * layer.in_channels + ic) *
                                   layer.kh + ky) * layer.kw + kx] = acc;
                }
    }

    for (int ic = 0; ic < input.channels; ++ic)
        for (int iy = 0; iy < input.height; ++iy)
            for (int ix = 0; ix < input.width; ++ix) {
                double acc = 0.0;
                for (int oc = 0; oc < layer.out_channels; ++oc)
                    for (int ky = 0; ky < layer.kh; ++ky)
                        for (int kx = 0; kx < layer.kw; ++kx) {
                            const int oy = iy - ky + layer.pad_h;
                            const int ox = ix - kx + layer.pad_w;
                            if (oy < 0 || oy >= oh || ox < 0 || ox >= ow) continue;
                            acc += layer.w(oc, ic, ky, kx) * grad_output.at(oc, oy, ox);
                        }
                g.input.at(ic, iy, ix) = acc;
            }
    return g;
}

}  // namespace serial

}  // namespace crest
