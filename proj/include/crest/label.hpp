#pragma once

#include "crest/tensor.hpp"

namespace crest {

// Regression target: 2-D Gaussian with peak exactly 1.0 at the center cell
// (floor(dims / 2)) and values in (0, 1].
struct GaussianLabelSpec {
    int height = 0;
    int width = 0;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
};

Tensor3 gaussian_label(const GaussianLabelSpec& spec);

// Same Gaussian recentered at an integer cell; used for update pairs where
// the peak follows the detected location.
Tensor3 gaussian_label_at(const GaussianLabelSpec& spec, int center_x, int center_y);

}  // namespace crest
