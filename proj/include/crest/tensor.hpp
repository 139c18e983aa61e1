#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "crest/error.hpp"

namespace crest {

// Dense channel-major 3-D array of doubles. The universal carrier for
// image patches, feature maps, filter stacks and response maps.
// data layout: data[(c * height + y) * width + x].
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor3() = default;

    Tensor3(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w) {
        if (c < 0 || h < 0 || w < 0)
            throw ArgumentError("Tensor3: negative dimension " + shape_str());
        data.assign(static_cast<size_t>(c) * h * w, fill);
    }

    size_t size() const { return data.size(); }

    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }

    double* channel(int c) {
        return data.data() + static_cast<size_t>(c) * height * width;
    }
    const double* channel(int c) const {
        return data.data() + static_cast<size_t>(c) * height * width;
    }

    bool same_shape(const Tensor3& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    std::string shape_str() const {
        return std::to_string(channels) + "x" + std::to_string(height) + "x" +
               std::to_string(width);
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    // Row-major first maximum; returns flat index within a channel.
    // Deterministic tie-break: the earliest index wins.
    struct Argmax {
        int c = 0, y = 0, x = 0;
        double value = 0.0;
    };
    Argmax argmax() const {
        Argmax best;
        best.value = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < channels; ++c)
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    double v = at(c, y, x);
                    if (v > best.value) best = {c, y, x, v};
                }
        return best;
    }
};

inline void require_same_shape(const Tensor3& a, const Tensor3& b,
                               const char* where) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(where) + ": shape mismatch " +
                         a.shape_str() + " vs " + b.shape_str());
}

// Response maps are single-channel Tensor3s; the alias documents intent.
using ResponseMap = Tensor3;

}  // namespace crest
