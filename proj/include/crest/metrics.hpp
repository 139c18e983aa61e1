#pragma once

#include <vector>

#include "crest/tracker.hpp"

namespace crest {

// Intersection-over-union of two boxes, in [0, 1].
double iou(const BBox& a, const BBox& b);

inline double center_error(const BBox& a, const BBox& b) {
    const double dx = a.cx() - b.cx();
    const double dy = a.cy() - b.cy();
    return std::sqrt(dx * dx + dy * dy);
}

// One-pass evaluation result. Frame 1 provides the init box and is excluded
// from the metric frames: predictions[0] is the given box and
// center_errors/overlaps hold frames 2..N.
struct OpeResult {
    std::string sequence;
    std::vector<BBox> predictions;       // one per frame, [0] = init box
    std::vector<double> center_errors;   // frames 2..N
    std::vector<double> overlaps;        // frames 2..N
    std::vector<double> precision;       // thresholds 0..50 px, step 1
    std::vector<double> success;         // thresholds 0..1, step 0.05
    double precision20 = 0.0;            // fraction with center error <= 20 px
    double auc = 0.0;                    // mean of the success samples
    double mean_iou = 0.0;
    double init_loss = 0.0;              // final loss of train_init
    double seconds = 0.0;
};

inline constexpr int kPrecisionThresholds = 51;  // 0..50 px
inline constexpr int kSuccessThresholds = 21;    // 0, 0.05, ..., 1.0

// Curves from per-frame errors: precision[t] = fraction with error <= t;
// success[k] = fraction with overlap >= 0.05k. Fills precision, success,
// precision20, auc and mean_iou.
void compute_curves(OpeResult& r);

}  // namespace crest
