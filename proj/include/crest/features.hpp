#pragma once

#include <memory>
#include <string>

#include "crest/image.hpp"
#include "crest/tensor.hpp"

namespace crest {

// Pluggable patch-to-feature-map mapping. Extractors are immutable after
// construction; extract() is reentrant.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual std::string name() const = 0;
    // Spatial downsampling factor; output dims = ceil(patch dims / stride).
    virtual int stride() const = 0;
    virtual int out_channels() const = 0;
    virtual Tensor3 extract(const Frame& patch) const = 0;
};

// Default desk-scale extractor: 3 channels at stride 1.
//   channel 0: grayscale mapped to [-0.5, 0.5]
//   channel 1: horizontal Sobel response / 8 (responds to vertical edges)
//   channel 2: vertical Sobel response / 8
// Each channel is then shifted to zero mean over the patch.
class GraySobelExtractor final : public FeatureExtractor {
public:
    std::string name() const override { return "gray_sobel"; }
    int stride() const override { return 1; }
    int out_channels() const override { return 3; }
    Tensor3 extract(const Frame& patch) const override;
};

Tensor3 extract_features_gray_grad(const Frame& patch);

// Conv-stack extractor loaded from a crest-tensors file; see conv_stack.hpp.
std::shared_ptr<FeatureExtractor> load_conv_stack(const std::string& path);

}  // namespace crest
