#include "crest/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace crest {

namespace {

int round_up_odd(double v) {
    int k = static_cast<int>(std::ceil(v));
    if (k < 1) k = 1;
    return k % 2 == 0 ? k + 1 : k;
}

int largest_odd_leq(int v) { return v % 2 == 0 ? v - 1 : v; }

}  // namespace

void TrackerConfig::validate() const {
    if (!(patch_factor > 0.0))
        throw ArgumentError("tracker config: patch_factor must be > 0");
    if (beta < 0.0 || beta > 1.0)
        throw ArgumentError("tracker config: beta must be in [0, 1], got " +
                            std::to_string(beta));
    if (update_period < 1)
        throw ArgumentError("tracker config: update period must be >= 1");
    if (update_iters < 0)
        throw ArgumentError("tracker config: update iters must be >= 0");
    if (std::find(scale_set.begin(), scale_set.end(), 1.0) == scale_set.end())
        throw ArgumentError("tracker config: scale set must contain 1.0");
    for (double s : scale_set)
        if (!(s > 0.0))
            throw ArgumentError("tracker config: scales must be positive");
    if (pca_channels < 1)
        throw ArgumentError("tracker config: pca_channels must be >= 1");
}

Tracker::Tracker(TrackerConfig config, std::shared_ptr<FeatureExtractor> extractor)
    : cfg_(std::move(config)), extractor_(std::move(extractor)) {
    cfg_.validate();
    if (!extractor_) throw ArgumentError("tracker: null feature extractor");
    // Ascending scales make the tie-break order concrete.
    std::sort(cfg_.scale_set.begin(), cfg_.scale_set.end());
}

Tensor3 Tracker::features_at(const Frame& frame, double cx, double cy,
                             double window) const {
    Frame patch = crop_patch(frame, cx, cy, window, window, patch_px_, patch_px_);
    return apply_pca(extractor_->extract(patch), pca_);
}

GaussianLabelSpec Tracker::label_spec() const {
    GaussianLabelSpec spec;
    spec.height = feat_h_;
    spec.width = feat_w_;
    spec.sigma_x = cfg_.sigma_factor * target_w_ / stride_;
    spec.sigma_y = cfg_.sigma_factor * target_h_ / stride_;
    return spec;
}

void Tracker::init(const Frame& frame, const BBox& bbox) {
    if (frame.empty()) throw ArgumentError("tracker init: empty frame");
    if (!bbox.valid())
        throw ArgumentError("tracker init: degenerate bbox " +
                            std::to_string(bbox.w) + "x" + std::to_string(bbox.h));

    BBox box = bbox;
    const double x2 = std::min(box.x + box.w, static_cast<double>(frame.width));
    const double y2 = std::min(box.y + box.h, static_cast<double>(frame.height));
    box.x = std::max(box.x, 0.0);
    box.y = std::max(box.y, 0.0);
    box.w = x2 - box.x;
    box.h = y2 - box.y;
    if (!box.valid())
        throw ArgumentError("tracker init: bbox entirely outside the frame");
    if (box.x != bbox.x || box.y != bbox.y || box.w != bbox.w || box.h != bbox.h)
        warnings_.push_back("init bbox clipped to frame bounds");

    frame_w_ = frame.width;
    frame_h_ = frame.height;
    center_x_ = box.cx();
    center_y_ = box.cy();
    target_w_ = box.w;
    target_h_ = box.h;

    // Square search window, 5x the larger target side, fixed for the whole
    // sequence; odd so the center cell is exact at stride 1.
    patch_px_ = static_cast<int>(std::lround(cfg_.patch_factor *
                                             std::max(target_w_, target_h_)));
    patch_px_ = std::max(patch_px_, 9);
    if (patch_px_ % 2 == 0) ++patch_px_;

    stride_ = extractor_->stride();
    feat_w_ = (patch_px_ + stride_ - 1) / stride_;
    feat_h_ = feat_w_;

    Frame patch = crop_patch(frame, center_x_, center_y_, patch_px_, patch_px_,
                             patch_px_, patch_px_);
    Tensor3 raw = extractor_->extract(patch);
    pca_ = fit_pca(raw, std::min(cfg_.pca_channels, raw.channels));
    Tensor3 feat = apply_pca(raw, pca_);

    // Base kernel covers the target in feature cells, rounded up to odd and
    // clamped to the map.
    int kx = std::min(round_up_odd(target_w_ / stride_), largest_odd_leq(feat_w_));
    int ky = std::min(round_up_odd(target_h_ / stride_), largest_odd_leq(feat_h_));

    model_.emplace(feat.channels, ky, kx, cfg_.lambda, cfg_.branches, cfg_.seed);
    if (cfg_.branches.temporal) model_->set_temporal_input(feat);

    CrestModel::TrainConfig tc;
    tc.lr = cfg_.lr_init;
    tc.loss_threshold = cfg_.loss_threshold;
    tc.max_iters = cfg_.max_init_iters;
    init_trace_ = model_->train_init(feat, gaussian_label(label_spec()), tc);

    bbox_ = box;
    frame_count_ = 1;
    buffer_.clear();
    update_skips_ = 0;
    initialized_ = true;
}

Tracker::StepResult Tracker::track(const Frame& frame) {
    if (!initialized_) throw ArgumentError("tracker: track before init");
    if (frame.width != frame_w_ || frame.height != frame_h_)
        throw ArgumentError("tracker: frame dims " + std::to_string(frame.width) +
                            "x" + std::to_string(frame.height) +
                            " differ from init dims " + std::to_string(frame_w_) +
                            "x" + std::to_string(frame_h_));

    // Localize: search patch at the previous center, same size as training.
    Tensor3 feat = features_at(frame, center_x_, center_y_, patch_px_);
    StepResult result;
    result.response = model_->forward(feat);
    Tensor3::Argmax am = result.response.argmax();

    center_x_ += cell_to_px(am.x - label_center_x());
    center_y_ += cell_to_px(am.y - label_center_y());

    if (cfg_.enable_scale && cfg_.scale_set.size() > 1) estimate_scale(frame);

    bbox_ = BBox{center_x_ - target_w_ / 2.0, center_y_ - target_h_ / 2.0,
                 target_w_, target_h_};

    // Training pair: the search-patch features with the label recentered at
    // the detected cell.
    buffer_.emplace_back(std::move(feat), gaussian_label_at(label_spec(), am.x, am.y));
    while (buffer_.size() > static_cast<size_t>(cfg_.update_period)) buffer_.pop_front();
    buffer_and_update(result);

    result.bbox = bbox_;
    return result;
}

void Tracker::estimate_scale(const Frame& frame) {
    // Scale patches crop at the new center, resized to the canonical patch
    // so candidate sizes are normalized before comparing raw maxima.
    std::vector<double> maxima(cfg_.scale_set.size());
    for (size_t i = 0; i < cfg_.scale_set.size(); ++i) {
        Tensor3 feat = features_at(frame, center_x_, center_y_,
                                   patch_px_ * cfg_.scale_set[i]);
        maxima[i] = model_->forward(feat).argmax().value;
    }

    // Scale 1.0 wins ties; a competitor must beat it strictly, first in
    // ascending order among equal competitors.
    size_t best = std::find(cfg_.scale_set.begin(), cfg_.scale_set.end(), 1.0) -
                  cfg_.scale_set.begin();
    for (size_t i = 0; i < maxima.size(); ++i)
        if (maxima[i] > maxima[best]) best = i;

    const double ws = target_w_ * cfg_.scale_set[best];
    const double hs = target_h_ * cfg_.scale_set[best];
    target_w_ = cfg_.beta * ws + (1.0 - cfg_.beta) * target_w_;
    target_h_ = cfg_.beta * hs + (1.0 - cfg_.beta) * target_h_;
}

void Tracker::buffer_and_update(StepResult& result) {
    ++frame_count_;
    if (!cfg_.enable_updates || frame_count_ % cfg_.update_period != 0) return;

    std::vector<std::pair<Tensor3, Tensor3>> pairs(buffer_.begin(), buffer_.end());
    CrestModel::UpdateConfig uc;
    uc.lr = cfg_.lr_update;
    uc.iters = cfg_.update_iters;

    if (cfg_.strict_paper) {
        model_->train_update(pairs, uc);
        result.model_updated = true;
    } else {
        // Drift guard: snapshot, update, and roll back if the batch loss
        // explodes or turns non-finite.
        CrestModel backup = *model_;
        const double pre = model_->batch_loss(pairs);
        bool ok = true;
        try {
            model_->train_update(pairs, uc);
            const double post = model_->batch_loss(pairs);
            ok = std::isfinite(post) && post <= 10.0 * (pre + 1e-12);
        } catch (const NumericError&) {
            ok = false;
        }
        if (ok) {
            result.model_updated = true;
        } else {
            *model_ = std::move(backup);
            ++update_skips_;
            result.update_skipped = true;
            warnings_.push_back("model update skipped at frame " +
                                std::to_string(frame_count_) + " (divergence)");
        }
    }
    buffer_.clear();
}

}  // namespace crest
