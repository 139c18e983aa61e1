#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crest/conv.hpp"
#include "crest/features.hpp"

namespace crest {

// Generic feature stack: a stored sequence of conv(+ReLU) and 2x2 max-pool
// stages applied to the normalized patch (pixels / 255). Stride is the
// product of the pool factors; spatial dims after pooling are ceil(d / 2).
struct ConvStackStage {
    enum class Kind { Conv, Pool } kind = Kind::Conv;
    ConvLayer layer;  // valid when kind == Conv
};

class ConvStackExtractor final : public FeatureExtractor {
public:
    ConvStackExtractor(std::string name, int input_channels,
                       std::vector<ConvStackStage> stages);

    std::string name() const override { return name_; }
    int stride() const override { return stride_; }
    int out_channels() const override { return out_channels_; }
    Tensor3 extract(const Frame& patch) const override;

    // The same composition applied to an arbitrary tensor; used by tests.
    Tensor3 apply(const Tensor3& input) const;

    const std::vector<ConvStackStage>& stages() const { return stages_; }
    int input_channels() const { return input_channels_; }

private:
    std::string name_;
    int input_channels_;
    std::vector<ConvStackStage> stages_;
    int stride_ = 1;
    int out_channels_ = 0;
};

Tensor3 max_pool2(const Tensor3& input);

void save_conv_stack(const ConvStackExtractor& stack, const std::string& path);

}  // namespace crest
