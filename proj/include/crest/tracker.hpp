#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crest/features.hpp"
#include "crest/image.hpp"
#include "crest/model.hpp"
#include "crest/pca.hpp"

namespace crest {

// Axis-aligned target rectangle, top-left corner plus size, image pixels.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    bool valid() const { return w > 0.0 && h > 0.0; }
};

struct TrackerConfig {
    double patch_factor = 5.0;  // search window = factor * max(w0, h0), square
    double beta = 0.6;          // scale smoothing weight
    std::vector<double> scale_set = {0.97, 1.0, 1.03};
    bool enable_scale = true;
    int update_period = 2;  // T: train every T tracked frames
    int update_iters = 2;
    bool enable_updates = true;
    double lr_init = 5e-3;
    double lr_update = 1e-4;
    double loss_threshold = 0.02;
    int max_init_iters = 500;
    double sigma_factor = 0.1;  // label sigma = factor * target dim / stride
    double lambda = 1e-4;
    BranchFlags branches = BranchFlags::spatiotemporal();
    int pca_channels = 64;  // reduced to min(this, feature channels)
    uint64_t seed = 0;
    bool strict_paper = false;  // disable the rollback-on-divergence guard
    bool subpixel = false;      // reserved; integer-cell argmax only

    // Paper-reported learning rates, tuned for deep conv-stack features.
    void apply_paper_profile() {
        lr_init = 5e-8;
        lr_update = 2e-9;
    }
    // Defaults for the gray+Sobel desk features.
    void apply_desk_profile() {
        lr_init = 5e-3;
        lr_update = 1e-4;
    }

    void validate() const;
};

// Online single-object tracker: init from frame 1 plus a box, then per
// frame localize via the response argmax, smooth the scale, and schedule
// model updates.
class Tracker {
public:
    Tracker(TrackerConfig config, std::shared_ptr<FeatureExtractor> extractor);

    void init(const Frame& frame, const BBox& bbox);

    struct StepResult {
        BBox bbox;
        ResponseMap response;
        bool model_updated = false;
        bool update_skipped = false;
    };
    StepResult track(const Frame& frame);

    bool initialized() const { return initialized_; }
    const BBox& bbox() const { return bbox_; }
    const CrestModel& model() const { return *model_; }
    CrestModel& model() { return *model_; }
    const PcaProjection& pca() const { return pca_; }
    const std::vector<double>& init_loss_trace() const { return init_trace_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    int update_skips() const { return update_skips_; }
    int frame_count() const { return frame_count_; }

    // Patch geometry, fixed at init.
    int patch_px() const { return patch_px_; }
    int feature_stride() const { return stride_; }
    int feature_w() const { return feat_w_; }
    int feature_h() const { return feat_h_; }
    int label_center_x() const { return feat_w_ / 2; }
    int label_center_y() const { return feat_h_ / 2; }

    // Response-cell displacement from the label center to image pixels.
    double cell_to_px(int cell_delta) const {
        return static_cast<double>(cell_delta) * stride_;
    }

private:
    Tensor3 features_at(const Frame& frame, double cx, double cy,
                        double window) const;
    void estimate_scale(const Frame& frame);
    void buffer_and_update(StepResult& result);
    GaussianLabelSpec label_spec() const;

    TrackerConfig cfg_;
    std::shared_ptr<FeatureExtractor> extractor_;

    bool initialized_ = false;
    int frame_w_ = 0, frame_h_ = 0;
    int patch_px_ = 0;
    int stride_ = 1;
    int feat_w_ = 0, feat_h_ = 0;
    double center_x_ = 0.0, center_y_ = 0.0;
    double target_w_ = 0.0, target_h_ = 0.0;
    BBox bbox_;
    PcaProjection pca_;
    std::optional<CrestModel> model_;
    std::vector<double> init_trace_;
    std::deque<std::pair<Tensor3, Tensor3>> buffer_;
    int frame_count_ = 0;
    int update_skips_ = 0;
    std::vector<std::string> warnings_;
};

}  // namespace crest
