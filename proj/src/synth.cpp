#include "crest/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "crest/rng.hpp"

namespace crest {

namespace {

constexpr int kPatternCells = 8;  // target texture resolution

struct Pattern {
    std::array<double, kPatternCells * kPatternCells> cells;

    // Nearest-cell sample at normalized coordinates in [0, 1).
    double at(double u, double v) const {
        int cu = static_cast<int>(u * kPatternCells);
        int cv = static_cast<int>(v * kPatternCells);
        cu = std::clamp(cu, 0, kPatternCells - 1);
        cv = std::clamp(cv, 0, kPatternCells - 1);
        return cells[static_cast<size_t>(cv) * kPatternCells + cu];
    }
};

Pattern random_pattern(Rng& rng, double lo, double hi) {
    Pattern p;
    for (double& c : p.cells) c = rng.uniform(lo, hi);
    return p;
}

}  // namespace

std::shared_ptr<MemorySequence> synth_sequence(const SynthSpec& spec) {
    if (spec.width < 16 || spec.height < 16 || spec.length < 1)
        throw ArgumentError("synth_sequence: frame dims must be >= 16 and length >= 1");
    if (!(spec.target_w > 2.0) || !(spec.target_h > 2.0))
        throw ArgumentError("synth_sequence: target size must exceed 2 px");

    Rng rng(spec.seed);

    // Static background: smooth waves plus a little fixed grain.
    std::vector<double> background(static_cast<size_t>(spec.width) * spec.height);
    const double ph1 = rng.uniform(0.0, 6.28), ph2 = rng.uniform(0.0, 6.28);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            background[static_cast<size_t>(y) * spec.width + x] =
                118.0 + 18.0 * std::sin(x * 0.13 + ph1) * std::sin(y * 0.17 + ph2) +
                rng.uniform(-4.0, 4.0);

    // Distractors: blocky patches pasted into the background.
    for (int i = 0; i < spec.clutter; ++i) {
        Pattern pat = random_pattern(rng, 60.0, 200.0);
        const int cw = 10 + static_cast<int>(rng.uniform_index(12));
        const int ch = 10 + static_cast<int>(rng.uniform_index(12));
        const int cx = static_cast<int>(rng.uniform_index(std::max(1, spec.width - cw)));
        const int cy = static_cast<int>(rng.uniform_index(std::max(1, spec.height - ch)));
        for (int y = 0; y < ch; ++y)
            for (int x = 0; x < cw; ++x)
                background[static_cast<size_t>(cy + y) * spec.width + (cx + x)] =
                    pat.at((x + 0.5) / cw, (y + 0.5) / ch);
    }

    Pattern target = random_pattern(rng, 10.0, 245.0);

    const double margin = 4.0;
    double x = spec.start_x >= 0.0 ? spec.start_x : (spec.width - spec.target_w) / 2.0;
    double y = spec.start_y >= 0.0 ? spec.start_y : (spec.height - spec.target_h) / 2.0;
    double vx = spec.vx, vy = spec.vy;
    double scale = 1.0;

    std::vector<Frame> frames;
    std::vector<BBox> gt;
    frames.reserve(spec.length);

    for (int t = 0; t < spec.length; ++t) {
        const double tw = spec.target_w * scale;
        const double th = spec.target_h * scale;

        Frame f(spec.height, spec.width, 1);
        for (int py = 0; py < spec.height; ++py)
            for (int px = 0; px < spec.width; ++px) {
                double v = background[static_cast<size_t>(py) * spec.width + px];
                const double u = (px + 0.5 - x) / tw;
                const double w = (py + 0.5 - y) / th;
                if (u >= 0.0 && u < 1.0 && w >= 0.0 && w < 1.0) v = target.at(u, w);
                if (spec.noise > 0.0) v += rng.uniform(-spec.noise, spec.noise);
                f.px(py, px, 0) = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
            }

        frames.push_back(std::move(f));
        gt.push_back(BBox{x, y, tw, th});

        // Advance: linear motion with reflection at the margins.
        x += vx;
        y += vy;
        scale *= 1.0 + spec.scale_drift;
        const double max_x = spec.width - spec.target_w * scale - margin;
        const double max_y = spec.height - spec.target_h * scale - margin;
        if (x < margin) { x = margin; vx = -vx; }
        if (x > max_x) { x = max_x; vx = -vx; }
        if (y < margin) { y = margin; vy = -vy; }
        if (y > max_y) { y = max_y; vy = -vy; }
    }

    return std::make_shared<MemorySequence>("synth", std::move(frames), std::move(gt));
}

SynthSpec parse_synth_spec(const std::string& text) {
    SynthSpec spec;
    std::string key, val;
    bool in_key = true;
    auto commit = [&]() {
        if (key.empty()) return;
        const double v = val.empty() ? 0.0 : std::stod(val);
        if (key == "width") spec.width = static_cast<int>(v);
        else if (key == "height") spec.height = static_cast<int>(v);
        else if (key == "length") spec.length = static_cast<int>(v);
        else if (key == "seed") spec.seed = static_cast<uint64_t>(v);
        else if (key == "tw") spec.target_w = v;
        else if (key == "th") spec.target_h = v;
        else if (key == "x") spec.start_x = v;
        else if (key == "y") spec.start_y = v;
        else if (key == "vx") spec.vx = v;
        else if (key == "vy") spec.vy = v;
        else if (key == "drift") spec.scale_drift = v;
        else if (key == "clutter") spec.clutter = static_cast<int>(v);
        else if (key == "noise") spec.noise = v;
        else throw ArgumentError("synth spec: unknown key '" + key + "'");
        key.clear();
        val.clear();
        in_key = true;
    };
    for (char c : text) {
        if (c == ',') commit();
        else if (c == '=') in_key = false;
        else if (in_key) key.push_back(c);
        else val.push_back(c);
    }
    commit();
    return spec;
}

}  // namespace crest
