#include "crest/conv_stack.hpp"

#include <algorithm>

#include "crest/tensor_io.hpp"

namespace crest {

Tensor3 max_pool2(const Tensor3& input) {
    const int oh = (input.height + 1) / 2;
    const int ow = (input.width + 1) / 2;
    Tensor3 out(input.channels, oh, ow);
    for (int c = 0; c < input.channels; ++c)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double best = -std::numeric_limits<double>::infinity();
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int iy = 2 * oy + dy;
                        const int ix = 2 * ox + dx;
                        if (iy >= input.height || ix >= input.width) continue;
                        best = std::max(best, input.at(c, iy, ix));
                    }
                out.at(c, oy, ox) = best;
            }
    return out;
}

ConvStackExtractor::ConvStackExtractor(std::string name, int input_channels,
                                       std::vector<ConvStackStage> stages)
    : name_(std::move(name)), input_channels_(input_channels),
      stages_(std::move(stages)) {
    if (input_channels_ != 1 && input_channels_ != 3)
        throw ValidationError("conv stack: input_channels must be 1 or 3, got " +
                              std::to_string(input_channels_));
    int channels = input_channels_;
    for (size_t i = 0; i < stages_.size(); ++i) {
        const auto& st = stages_[i];
        if (st.kind == ConvStackStage::Kind::Pool) {
            stride_ *= 2;
            continue;
        }
        if (st.layer.in_channels != channels)
            throw ValidationError("conv stack: stage " + std::to_string(i) +
                                  " expects " + std::to_string(st.layer.in_channels) +
                                  " input channels, chain provides " +
                                  std::to_string(channels));
        channels = st.layer.out_channels;
    }
    out_channels_ = channels;
}

Tensor3 ConvStackExtractor::apply(const Tensor3& input) const {
    Tensor3 cur = input;
    for (const auto& st : stages_) {
        if (st.kind == ConvStackStage::Kind::Pool) {
            cur = max_pool2(cur);
        } else {
            cur = relu_forward(conv2d_forward(cur, st.layer));
        }
    }
    return cur;
}

Tensor3 ConvStackExtractor::extract(const Frame& patch) const {
    if (patch.empty()) throw ArgumentError("conv stack: empty patch");
    if (patch.channels != input_channels_)
        throw ShapeError("conv stack: patch has " + std::to_string(patch.channels) +
                         " channels, stack expects " + std::to_string(input_channels_));
    Tensor3 in(patch.channels, patch.height, patch.width);
    for (int c = 0; c < patch.channels; ++c)
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x)
                in.at(c, y, x) = patch.px(y, x, c) / 255.0;
    return apply(in);
}

void save_conv_stack(const ConvStackExtractor& stack, const std::string& path) {
    TensorFile tf;
    tf.meta["kind"] = "conv_stack";
    tf.meta["name"] = stack.name();
    tf.meta["input_channels"] = stack.input_channels();
    nlohmann::json stages = nlohmann::json::array();
    int idx = 0;
    for (const auto& st : stack.stages()) {
        if (st.kind == ConvStackStage::Kind::Pool) {
            stages.push_back({{"type", "pool"}});
            continue;
        }
        stages.push_back({{"type", "conv"},
                          {"in_channels", st.layer.in_channels},
                          {"out_channels", st.layer.out_channels},
                          {"kh", st.layer.kh},
                          {"kw", st.layer.kw}});
        // Weight tensors ride as [oc, ic*kh, kw]; same flat layout as
        // ConvLayer::weights. Bias as [1, 1, oc].
        Tensor3 w(st.layer.out_channels, st.layer.in_channels * st.layer.kh,
                  st.layer.kw);
        w.data = st.layer.weights;
        Tensor3 b(1, 1, st.layer.out_channels);
        b.data = st.layer.bias;
        tf.add("conv" + std::to_string(idx) + ".weights", w);
        tf.add("conv" + std::to_string(idx) + ".bias", b);
        ++idx;
    }
    tf.meta["stages"] = stages;
    write_tensor_file(tf, path);
}

std::shared_ptr<FeatureExtractor> load_conv_stack(const std::string& path) {
    TensorFile tf = read_tensor_file(path);
    if (tf.meta.value("kind", "") != "conv_stack")
        throw ValidationError("conv stack: file kind is not conv_stack: " + path);
    if (!tf.meta.contains("stages") || !tf.meta["stages"].is_array())
        throw ValidationError("conv stack: missing stages list: " + path);

    const int input_channels = tf.meta.value("input_channels", 0);
    std::vector<ConvStackStage> stages;
    int idx = 0;
    for (const auto& s : tf.meta["stages"]) {
        const std::string type = s.value("type", "");
        if (type == "pool") {
            ConvStackStage st;
            st.kind = ConvStackStage::Kind::Pool;
            stages.push_back(std::move(st));
            continue;
        }
        if (type != "conv")
            throw ValidationError("conv stack: unknown stage type '" + type +
                                  "': " + path);
        ConvStackStage st;
        st.kind = ConvStackStage::Kind::Conv;
        try {
            st.layer = ConvLayer(s.value("in_channels", 0), s.value("out_channels", 0),
                                 s.value("kh", 0), s.value("kw", 0));
        } catch (const ArgumentError& e) {
            throw ValidationError("conv stack: bad conv stage " + std::to_string(idx) +
                                  " (" + e.what() + "): " + path);
        }
        const std::string wname = "conv" + std::to_string(idx) + ".weights";
        const std::string bname = "conv" + std::to_string(idx) + ".bias";
        if (!tf.has(wname) || !tf.has(bname))
            throw ValidationError("conv stack: missing tensors for stage " +
                                  std::to_string(idx) + ": " + path);
        const Tensor3& w = tf.get(wname);
        const Tensor3& b = tf.get(bname);
        if (w.data.size() != st.layer.weights.size() ||
            b.data.size() != st.layer.bias.size())
            throw ValidationError("conv stack: tensor sizes disagree with declared "
                                  "shapes for stage " + std::to_string(idx) + ": " + path);
        st.layer.weights = w.data;
        st.layer.bias = b.data;
        stages.push_back(std::move(st));
        ++idx;
    }
    return std::make_shared<ConvStackExtractor>(tf.meta.value("name", "conv_stack"),
                                                input_channels, std::move(stages));
}

}  // namespace crest
