#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crest/error.hpp"

namespace crest {

// 8-bit image, interleaved RGB (channels = 3) or grayscale (channels = 1).
struct Frame {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<uint8_t> pixels;

    Frame() = default;
    Frame(int h, int w, int c, uint8_t fill = 0)
        : height(h), width(w), channels(c),
          pixels(static_cast<size_t>(h) * w * c, fill) {
        if (h <= 0 || w <= 0 || (c != 1 && c != 3))
            throw ArgumentError("Frame: bad dims " + std::to_string(h) + "x" +
                                std::to_string(w) + "x" + std::to_string(c));
    }

    uint8_t& px(int y, int x, int c) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t px(int y, int x, int c) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    bool empty() const { return pixels.empty(); }
};

// Axis-aligned window of `size` centered at `center`, bilinearly resampled
// to out_w x out_h. Samples outside the image replicate the border pixel.
// Coordinates use the half-pixel convention: pixel (i, j) covers
// [j, j+1) x [i, i+1) with center (j + 0.5, i + 0.5).
Frame crop_patch(const Frame& frame, double center_x, double center_y,
                 double size_w, double size_h, int out_w, int out_h);

// PPM (P6) / PGM (P5) and, when built with libpng, PNG.
Frame load_image(const std::string& path);
void save_ppm(const Frame& frame, const std::string& path);

}  // namespace crest
