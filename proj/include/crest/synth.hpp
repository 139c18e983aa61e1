#pragma once

#include <memory>

#include "crest/sequence.hpp"

namespace crest {

// Deterministic synthetic sequence: a high-contrast blocky target moving
// over a smooth textured background. Ground truth is exact by construction.
struct SynthSpec {
    int width = 160;
    int height = 120;
    int length = 30;
    uint64_t seed = 1;
    double target_w = 24.0;
    double target_h = 24.0;
    double start_x = -1.0;  // top-left; negative = centered horizontally
    double start_y = -1.0;
    double vx = 2.0;        // px/frame, bounces off a safety margin
    double vy = 0.0;
    double scale_drift = 0.0;  // per-frame relative size change (0.01 = +1%)
    int clutter = 0;           // distractor patches on the background
    double noise = 0.0;        // uniform per-pixel noise amplitude, 0..255
};

std::shared_ptr<MemorySequence> synth_sequence(const SynthSpec& spec);

// key=value,key=value parser for the CLI (--synth "length=100,vx=2").
SynthSpec parse_synth_spec(const std::string& text);

}  // namespace crest
