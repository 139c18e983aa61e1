#include "crest/label.hpp"

#include <cmath>

namespace crest {

Tensor3 gaussian_label_at(const GaussianLabelSpec& spec, int center_x, int center_y) {
    if (spec.height < 1 || spec.width < 1)
        throw ArgumentError("gaussian_label: dims must be >= 1, got " +
                            std::to_string(spec.height) + "x" +
                            std::to_string(spec.width));
    if (!(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0))
        throw ArgumentError("gaussian_label: sigma must be positive, got (" +
                            std::to_string(spec.sigma_x) + ", " +
                            std::to_string(spec.sigma_y) + ")");
    Tensor3 y(1, spec.height, spec.width);
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
            const double dx = c - center_x;
            const double dy = r - center_y;
            y.at(0, r, c) = std::exp(-(dx * dx / (2.0 * spec.sigma_x * spec.sigma_x) +
                                       dy * dy / (2.0 * spec.sigma_y * spec.sigma_y)));
        }
    return y;
}

Tensor3 gaussian_label(const GaussianLabelSpec& spec) {
    return gaussian_label_at(spec, spec.width / 2, spec.height / 2);
}

}  // namespace crest
