#include "crest/features.hpp"

namespace crest {

namespace {

inline double gray_at(const Frame& f, int y, int x) {
    if (f.channels == 1) return f.px(y, x, 0) / 255.0;
    return (0.299 * f.px(y, x, 0) + 0.587 * f.px(y, x, 1) + 0.114 * f.px(y, x, 2)) /
           255.0;
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

Tensor3 extract_features_gray_grad(const Frame& patch) {
    if (patch.empty()) throw ArgumentError("extract_features_gray_grad: empty patch");
    const int h = patch.height, w = patch.width;
    Tensor3 out(3, h, w);

    // Gray plane first; Sobel reads from it with replicated borders.
    std::vector<double> gray(static_cast<size_t>(h) * w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            gray[static_cast<size_t>(y) * w + x] = gray_at(patch, y, x);

    auto g = [&](int y, int x) {
        return gray[static_cast<size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)];
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            out.at(0, y, x) = g(y, x) - 0.5;
            const double gx = (g(y - 1, x + 1) + 2.0 * g(y, x + 1) + g(y + 1, x + 1)) -
                              (g(y - 1, x - 1) + 2.0 * g(y, x - 1) + g(y + 1, x - 1));
            const double gy = (g(y + 1, x - 1) + 2.0 * g(y + 1, x) + g(y + 1, x + 1)) -
                              (g(y - 1, x - 1) + 2.0 * g(y - 1, x) + g(y - 1, x + 1));
            out.at(1, y, x) = gx / 8.0;
            out.at(2, y, x) = gy / 8.0;
        }

    // Zero-mean per channel.
    const size_t area = static_cast<size_t>(h) * w;
    for (int c = 0; c < 3; ++c) {
        double* p = out.channel(c);
        double mean = 0.0;
        for (size_t i = 0; i < area; ++i) mean += p[i];
        mean /= static_cast<double>(area);
        for (size_t i = 0; i < area; ++i) p[i] -= mean;
    }
    return out;
}

Tensor3 GraySobelExtractor::extract(const Frame& patch) const {
    return extract_features_gray_grad(patch);
}

}  // namespace crest
