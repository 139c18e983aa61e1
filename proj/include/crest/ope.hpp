#pragma once

#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "crest/metrics.hpp"
#include "crest/sequence.hpp"

namespace crest {

// Minimal surface run_ope needs; lets tests drive the evaluation with
// stub trackers. The runner never shows the tracker any ground truth past
// frame 1.
class OnlineTracker {
public:
    virtual ~OnlineTracker() = default;
    virtual void init(const Frame& frame, const BBox& bbox) = 0;
    virtual BBox track(const Frame& frame) = 0;
};

// Adapter over the real tracker; on_step fires after every tracked frame
// (response dumps, progress).
class CrestOnlineTracker final : public OnlineTracker {
public:
    CrestOnlineTracker(TrackerConfig config, std::shared_ptr<FeatureExtractor> ext)
        : tracker_(std::move(config), std::move(ext)) {}

    void init(const Frame& frame, const BBox& bbox) override {
        tracker_.init(frame, bbox);
    }
    BBox track(const Frame& frame) override {
        auto step = tracker_.track(frame);
        if (on_step) on_step(tracker_.frame_count(), step);
        return step.bbox;
    }

    Tracker& tracker() { return tracker_; }
    std::function<void(int frame_index, const Tracker::StepResult&)> on_step;

private:
    Tracker tracker_;
};

// One-pass evaluation: init on frame 1 ground truth, track every later
// frame once, no restarts. Tracker errors are rethrown with the frame
// index attached.
OpeResult run_ope(const SequenceSource& seq, OnlineTracker& tracker);

// Output writers. The resolved run configuration is embedded in the JSON
// and as comment rows in the CSV.
void write_ope_json(const OpeResult& r, const nlohmann::json& config,
                    const std::string& path);
void write_curves_csv(const OpeResult& r, const nlohmann::json& config,
                      const std::string& path);

struct CurveSeries {
    std::string label;
    std::string color;
    std::vector<double> xs;
    std::vector<double> ys;
};
void write_plots_svg(const std::string& path, const std::string& title,
                     const std::vector<CurveSeries>& precision_series,
                     const std::vector<CurveSeries>& success_series);
void write_plots_svg(const OpeResult& r, const std::string& path);

}  // namespace crest
