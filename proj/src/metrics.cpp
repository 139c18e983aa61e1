#include "crest/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace crest {

double iou(const BBox& a, const BBox& b) {
    if (!a.valid() || !b.valid())
        throw ArgumentError("iou: boxes must have positive size");
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return inter / uni;
}

void compute_curves(OpeResult& r) {
    const size_t n = r.center_errors.size();
    r.precision.assign(kPrecisionThresholds, 0.0);
    r.success.assign(kSuccessThresholds, 0.0);
    r.precision20 = 0.0;
    r.auc = 0.0;
    r.mean_iou = 0.0;
    if (n == 0) return;

    for (int t = 0; t < kPrecisionThresholds; ++t) {
        size_t hit = 0;
        for (double e : r.center_errors)
            if (e <= static_cast<double>(t)) ++hit;
        r.precision[t] = static_cast<double>(hit) / static_cast<double>(n);
    }
    for (int k = 0; k < kSuccessThresholds; ++k) {
        const double thr = static_cast<double>(k) / 20.0;  // exact at 0 and 1
        size_t hit = 0;
        for (double o : r.overlaps)
            if (o >= thr) ++hit;
        r.success[k] = static_cast<double>(hit) / static_cast<double>(n);
    }

    size_t hit20 = 0;
    for (double e : r.center_errors)
        if (e <= 20.0) ++hit20;
    r.precision20 = static_cast<double>(hit20) / static_cast<double>(n);

    for (double s : r.success) r.auc += s;
    r.auc /= static_cast<double>(kSuccessThresholds);

    for (double o : r.overlaps) r.mean_iou += o;
    r.mean_iou /= static_cast<double>(n);
}

}  // namespace crest
