#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crest/image.hpp"
#include "crest/tracker.hpp"

namespace crest {

// Ordered frames with per-frame ground truth.
class SequenceSource {
public:
    virtual ~SequenceSource() = default;
    virtual std::string name() const = 0;
    virtual size_t frame_count() const = 0;
    virtual Frame frame(size_t index) const = 0;
    virtual BBox ground_truth(size_t index) const = 0;
    virtual std::vector<std::string> attributes() const { return {}; }
};

// On-disk OTB-style sequence: <dir>/img/*.{ppm,pgm,png} plus
// <dir>/groundtruth_rect.txt with one `x,y,w,h` line per frame (comma or
// tab separated, 1-based corner converted to 0-based).
struct SequenceAnnotation {
    std::string name;
    std::vector<std::string> frame_paths;
    std::vector<BBox> ground_truth;
    std::vector<std::string> attributes;
};

SequenceAnnotation load_sequence(const std::string& dir);

class DiskSequence final : public SequenceSource {
public:
    explicit DiskSequence(SequenceAnnotation ann) : ann_(std::move(ann)) {}

    std::string name() const override { return ann_.name; }
    size_t frame_count() const override { return ann_.frame_paths.size(); }
    Frame frame(size_t i) const override { return load_image(ann_.frame_paths.at(i)); }
    BBox ground_truth(size_t i) const override { return ann_.ground_truth.at(i); }
    std::vector<std::string> attributes() const override { return ann_.attributes; }

private:
    SequenceAnnotation ann_;
};

// Fully in-memory sequence; used by the synthetic generator and tests.
class MemorySequence final : public SequenceSource {
public:
    MemorySequence(std::string name, std::vector<Frame> frames, std::vector<BBox> gt)
        : name_(std::move(name)), frames_(std::move(frames)), gt_(std::move(gt)) {}

    std::string name() const override { return name_; }
    size_t frame_count() const override { return frames_.size(); }
    Frame frame(size_t i) const override { return frames_.at(i); }
    BBox ground_truth(size_t i) const override { return gt_.at(i); }

private:
    std::string name_;
    std::vector<Frame> frames_;
    std::vector<BBox> gt_;
};

}  // namespace crest
