#include "crest/model.hpp"

#include <cmath>

namespace crest {

BranchFlags parse_branches(const std::string& s) {
    if (s == "base") return BranchFlags::base_only();
    if (s == "spatial") return BranchFlags::with_spatial();
    if (s == "spatiotemporal") return BranchFlags::spatiotemporal();
    throw ArgumentError("branches must be base|spatial|spatiotemporal, got '" + s + "'");
}

namespace {

std::array<TrainableLayer, 3> make_branch(int in_channels) {
    std::array<TrainableLayer, 3> b;
    b[0].layer = ConvLayer(in_channels, kResidualWidth, 1, 1);
    b[1].layer = ConvLayer(kResidualWidth, kResidualWidth, 3, 3);
    b[2].layer = ConvLayer(kResidualWidth, 1, 3, 3);
    for (auto& l : b) l.reset_state();
    return b;
}

}  // namespace

CrestModel::CrestModel(int in_channels, int base_kh, int base_kw, double lambda,
                       BranchFlags branches, uint64_t seed)
    : in_channels_(in_channels), lambda_(lambda), branches_(branches) {
    if (lambda < 0.0) throw ArgumentError("CrestModel: lambda must be >= 0");
    base_.layer = ConvLayer(in_channels, 1, base_kh, base_kw);
    base_.reset_state();
    if (branches_.spatial) spatial_ = make_branch(in_channels);
    if (branches_.temporal) temporal_ = make_branch(in_channels);

    // Zero-mean Gaussian init, std 1e-3. Base drawn first so ablation
    // configs sharing a seed start from identical base weights.
    Rng rng(seed);
    base_.layer.init_gaussian(rng, 1e-3);
    if (branches_.spatial)
        for (auto& l : spatial_) l.layer.init_gaussian(rng, 1e-3);
    if (branches_.temporal)
        for (auto& l : temporal_) l.layer.init_gaussian(rng, 1e-3);
}

void CrestModel::set_temporal_input(Tensor3 x1) {
    if (temporal_input_)
        throw ArgumentError("CrestModel: temporal input is frozen once set");
    temporal_input_ = std::move(x1);
}

Tensor3 CrestModel::branch_forward(const std::array<TrainableLayer, 3>& branch,
                                   const Tensor3& x) const {
    Tensor3 h = relu_forward(conv2d_forward(x, branch[0].layer));
    h = relu_forward(conv2d_forward(h, branch[1].layer));
    return conv2d_forward(h, branch[2].layer);
}

ResponseMap CrestModel::forward(const Tensor3& x) const {
    if (x.channels != in_channels_)
        throw ShapeError("CrestModel::forward: input " + x.shape_str() +
                         " vs expected channels " + std::to_string(in_channels_));
    ResponseMap resp = conv2d_forward(x, base_.layer);
    if (branches_.spatial) {
        Tensor3 s = branch_forward(spatial_, x);
        for (size_t i = 0; i < resp.data.size(); ++i) resp.data[i] += s.data[i];
    }
    if (branches_.temporal) {
        if (!temporal_input_)
            throw ShapeError("CrestModel::forward: temporal branch enabled but no "
                             "temporal input set");
        if (temporal_input_->height != x.height || temporal_input_->width != x.width)
            throw ShapeError("CrestModel::forward: temporal input " +
                             temporal_input_->shape_str() + " vs current input " +
                             x.shape_str());
        Tensor3 t = branch_forward(temporal_, *temporal_input_);
        for (size_t i = 0; i < resp.data.size(); ++i) resp.data[i] += t.data[i];
    }
    return resp;
}

CrestModel::LossGrads CrestModel::loss_and_grads(const Tensor3& x,
                                                 const Tensor3& y) const {
    if (x.channels != in_channels_)
        throw ShapeError("loss_and_grads: input " + x.shape_str() +
                         " vs expected channels " + std::to_string(in_channels_));

    // Forward with cached activations.
    Tensor3 base_out = conv2d_forward(x, base_.layer);
    require_same_shape(base_out, y, "loss_and_grads");

    struct BranchCache {
        Tensor3 a1, r1, a2, r2, out;
    };
    auto run_branch = [&](const std::array<TrainableLayer, 3>& branch,
                          const Tensor3& in) {
        BranchCache c;
        c.a1 = conv2d_forward(in, branch[0].layer);
        c.r1 = relu_forward(c.a1);
        c.a2 = conv2d_forward(c.r1, branch[1].layer);
        c.r2 = relu_forward(c.a2);
        c.out = conv2d_forward(c.r2, branch[2].layer);
        return c;
    };

    Tensor3 resp = base_out;
    BranchCache sc, tc;
    if (branches_.spatial) {
        sc = run_branch(spatial_, x);
        for (size_t i = 0; i < resp.data.size(); ++i) resp.data[i] += sc.out.data[i];
    }
    if (branches_.temporal) {
        if (!temporal_input_)
            throw ShapeError("loss_and_grads: temporal branch enabled but no "
                             "temporal input set");
        tc = run_branch(temporal_, *temporal_input_);
        for (size_t i = 0; i < resp.data.size(); ++i) resp.data[i] += tc.out.data[i];
    }

    L2Loss l2 = l2_loss(resp, y);

    LossGrads out;
    out.loss = l2.value;

    // Response is a plain sum of branch outputs, so each branch sees the
    // same upstream gradient.
    const Tensor3& g = l2.grad_pred;

    auto push_layer = [&](const TrainableLayer& tl, ConvGrads&& cg) {
        // Fold the regularization gradient 2*lambda*param in here so the
        // returned gradients are exact for the returned loss.
        for (size_t i = 0; i < cg.weights.size(); ++i)
            cg.weights[i] += 2.0 * lambda_ * tl.layer.weights[i];
        for (size_t i = 0; i < cg.bias.size(); ++i)
            cg.bias[i] += 2.0 * lambda_ * tl.layer.bias[i];
        out.weight_grads.push_back(std::move(cg.weights));
        out.bias_grads.push_back(std::move(cg.bias));
    };

    auto backprop_branch = [&](const std::array<TrainableLayer, 3>& branch,
                               const BranchCache& c, const Tensor3& in) {
        ConvGrads g3 = conv2d_backward(c.r2, branch[2].layer, g);
        Tensor3 d2 = relu_backward(c.a2, g3.input);
        ConvGrads g2 = conv2d_backward(c.r1, branch[1].layer, d2);
        Tensor3 d1 = relu_backward(c.a1, g2.input);
        ConvGrads g1 = conv2d_backward(in, branch[0].layer, d1);
        push_layer(branch[0], std::move(g1));
        push_layer(branch[1], std::move(g2));
        push_layer(branch[2], std::move(g3));
    };

    push_layer(base_, conv2d_backward(x, base_.layer, g));
    if (branches_.spatial) backprop_branch(spatial_, sc, x);
    if (branches_.temporal) backprop_branch(temporal_, tc, *temporal_input_);

    // Regularization term over every enabled parameter.
    double reg = 0.0;
    for (const TrainableLayer* tl : parameter_layers()) {
        for (double w : tl->layer.weights) reg += w * w;
        for (double b : tl->layer.bias) reg += b * b;
    }
    out.loss += lambda_ * reg;
    return out;
}

std::vector<TrainableLayer*> CrestModel::parameter_layers() {
    std::vector<TrainableLayer*> v{&base_};
    if (branches_.spatial)
        for (auto& l : spatial_) v.push_back(&l);
    if (branches_.temporal)
        for (auto& l : temporal_) v.push_back(&l);
    return v;
}

std::vector<const TrainableLayer*> CrestModel::parameter_layers() const {
    std::vector<const TrainableLayer*> v{&base_};
    if (branches_.spatial)
        for (const auto& l : spatial_) v.push_back(&l);
    if (branches_.temporal)
        for (const auto& l : temporal_) v.push_back(&l);
    return v;
}

std::vector<double> CrestModel::parameter_vector() const {
    std::vector<double> flat;
    for (const TrainableLayer* tl : parameter_layers()) {
        flat.insert(flat.end(), tl->layer.weights.begin(), tl->layer.weights.end());
        flat.insert(flat.end(), tl->layer.bias.begin(), tl->layer.bias.end());
    }
    return flat;
}

void CrestModel::load_parameter_vector(const std::vector<double>& flat) {
    size_t pos = 0;
    for (TrainableLayer* tl : parameter_layers()) {
        if (pos + tl->layer.weights.size() + tl->layer.bias.size() > flat.size())
            throw ShapeError("load_parameter_vector: vector too short");
        std::copy(flat.begin() + pos, flat.begin() + pos + tl->layer.weights.size(),
                  tl->layer.weights.begin());
        pos += tl->layer.weights.size();
        std::copy(flat.begin() + pos, flat.begin() + pos + tl->layer.bias.size(),
                  tl->layer.bias.begin());
        pos += tl->layer.bias.size();
    }
    if (pos != flat.size())
        throw ShapeError("load_parameter_vector: vector length mismatch");
}

namespace {

void apply_grads(CrestModel& model, const CrestModel::LossGrads& lg, double lr) {
    auto layers = model.parameter_layers();
    for (size_t i = 0; i < layers.size(); ++i) {
        adam_step(layers[i]->layer.weights, lg.weight_grads[i], layers[i]->w_state, lr);
        adam_step(layers[i]->layer.bias, lg.bias_grads[i], layers[i]->b_state, lr);
    }
}

}  // namespace

std::vector<double> CrestModel::train_init(const Tensor3& x, const Tensor3& y,
                                           const TrainConfig& cfg) {
    std::vector<double> trace;
    LossGrads lg = loss_and_grads(x, y);
    if (!std::isfinite(lg.loss))
        throw DivergenceError("train_init: non-finite initial loss", trace);
    trace.push_back(lg.loss);

    int steps = 0;
    while (trace.back() >= cfg.loss_threshold && steps < cfg.max_iters) {
        apply_grads(*this, lg, cfg.lr);
        ++steps;
        lg = loss_and_grads(x, y);
        if (!std::isfinite(lg.loss))
            throw DivergenceError("train_init: loss diverged at step " +
                                      std::to_string(steps), trace);
        trace.push_back(lg.loss);
    }
    return trace;
}

double CrestModel::batch_loss(
    const std::vector<std::pair<Tensor3, Tensor3>>& pairs) const {
    double total = 0.0;
    for (const auto& [x, y] : pairs) total += loss_and_grads(x, y).loss;
    return total;
}

void CrestModel::train_update(const std::vector<std::pair<Tensor3, Tensor3>>& pairs,
                              const UpdateConfig& cfg) {
    if (pairs.empty()) throw ArgumentError("train_update: empty pair list");
    std::vector<double> trace;
    for (int it = 0; it < cfg.iters; ++it) {
        // Summed loss and gradients over all pairs, pair order fixed.
        LossGrads total = loss_and_grads(pairs[0].first, pairs[0].second);
        for (size_t p = 1; p < pairs.size(); ++p) {
            LossGrads lg = loss_and_grads(pairs[p].first, pairs[p].second);
            total.loss += lg.loss;
            for (size_t i = 0; i < total.weight_grads.size(); ++i) {
                for (size_t j = 0; j < total.weight_grads[i].size(); ++j)
                    total.weight_grads[i][j] += lg.weight_grads[i][j];
                for (size_t j = 0; j < total.bias_grads[i].size(); ++j)
                    total.bias_grads[i][j] += lg.bias_grads[i][j];
            }
        }
        if (!std::isfinite(total.loss))
            throw DivergenceError("train_update: loss diverged at iteration " +
                                      std::to_string(it), trace);
        trace.push_back(total.loss);
        apply_grads(*this, total, cfg.lr);
    }
}

}  // namespace crest
