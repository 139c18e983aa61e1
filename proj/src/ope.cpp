#include "crest/ope.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace crest {

OpeResult run_ope(const SequenceSource& seq, OnlineTracker& tracker) {
    const size_t n = seq.frame_count();
    if (n == 0) throw ArgumentError("run_ope: empty sequence");

    OpeResult r;
    r.sequence = seq.name();
    const auto t0 = std::chrono::steady_clock::now();

    const BBox init_box = seq.ground_truth(0);
    try {
        tracker.init(seq.frame(0), init_box);
    } catch (const Error& e) {
        throw Error("frame 1: " + std::string(e.what()));
    }
    r.predictions.push_back(init_box);

    for (size_t i = 1; i < n; ++i) {
        BBox pred;
        try {
            pred = tracker.track(seq.frame(i));
        } catch (const Error& e) {
            throw Error("frame " + std::to_string(i + 1) + ": " +
                        std::string(e.what()));
        }
        r.predictions.push_back(pred);
        const BBox gt = seq.ground_truth(i);
        r.center_errors.push_back(center_error(pred, gt));
        r.overlaps.push_back(iou(pred, gt));
    }

    compute_curves(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

namespace {

nlohmann::json box_json(const BBox& b) {
    return nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

}  // namespace

void write_ope_json(const OpeResult& r, const nlohmann::json& config,
                    const std::string& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["sequence"] = r.sequence;
    j["config"] = config;
    j["precision20"] = r.precision20;
    j["auc"] = r.auc;
    j["mean_iou"] = r.mean_iou;
    j["init_loss"] = r.init_loss;
    j["seconds"] = r.seconds;
    j["precision"] = r.precision;
    j["success"] = r.success;
    j["center_errors"] = r.center_errors;
    j["overlaps"] = r.overlaps;
    nlohmann::json preds = nlohmann::json::array();
    for (const BBox& b : r.predictions) preds.push_back(box_json(b));
    j["predictions"] = preds;

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_curves_csv(const OpeResult& r, const nlohmann::json& config,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# sequence: " << r.sequence << "\n";
    out << "# config: " << config.dump() << "\n";
    out << "curve,threshold,value\n";
    char buf[64];
    for (int t = 0; t < kPrecisionThresholds; ++t) {
        std::snprintf(buf, sizeof buf, "precision,%d,%.10g\n", t, r.precision[t]);
        out << buf;
    }
    for (int k = 0; k < kSuccessThresholds; ++k) {
        std::snprintf(buf, sizeof buf, "success,%.2f,%.10g\n", k / 20.0, r.success[k]);
        out << buf;
    }
}

namespace {

// Minimal line-plot rendering; enough for precision/success curves.
void render_panel(std::string& svg, double ox, double oy, double w, double h,
                  const std::string& title, const std::string& x_label,
                  double x_max, const std::vector<CurveSeries>& series) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' fill='white' "
                  "stroke='black'/>\n",
                  ox, oy, w, h);
    svg += buf;
    // Gridlines at quarters.
    for (int i = 1; i < 4; ++i) {
        std::snprintf(buf, sizeof buf,
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' "
                      "stroke='#dddddd'/>\n",
                      ox, oy + h * i / 4.0, ox + w, oy + h * i / 4.0);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' "
                      "stroke='#dddddd'/>\n",
                      ox + w * i / 4.0, oy, ox + w * i / 4.0, oy + h);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x='%.1f' y='%.1f' font-size='13' text-anchor='middle' "
                  "font-family='sans-serif'>%s</text>\n",
                  ox + w / 2.0, oy - 8.0, title.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle' "
                  "font-family='sans-serif'>%s</text>\n",
                  ox + w / 2.0, oy + h + 28.0, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x='%.1f' y='%.1f' font-size='10' font-family='sans-serif'>"
                  "0</text>\n<text x='%.1f' y='%.1f' font-size='10' "
                  "font-family='sans-serif'>%g</text>\n",
                  ox - 4.0, oy + h + 12.0, ox + w - 8.0, oy + h + 12.0, x_max);
    svg += buf;

    double legend_y = oy + 14.0;
    for (const auto& s : series) {
        std::string pts;
        for (size_t i = 0; i < s.xs.size(); ++i) {
            const double px = ox + (s.xs[i] / x_max) * w;
            const double py = oy + h - s.ys[i] * h;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
            pts += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<polyline points='%s' fill='none' stroke='%s' "
                      "stroke-width='1.5'/>\n",
                      pts.c_str(), s.color.c_str());
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x='%.1f' y='%.1f' font-size='10' fill='%s' "
                      "font-family='sans-serif'>%s</text>\n",
                      ox + 8.0, legend_y, s.color.c_str(), s.label.c_str());
        svg += buf;
        legend_y += 12.0;
    }
}

}  // namespace

void write_plots_svg(const std::string& path, const std::string& title,
                     const std::vector<CurveSeries>& precision_series,
                     const std::vector<CurveSeries>& success_series) {
    std::string svg;
    svg += "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='320'>\n";
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<text x='320' y='18' font-size='15' text-anchor='middle' "
                  "font-family='sans-serif'>%s</text>\n",
                  title.c_str());
    svg += buf;
    render_panel(svg, 40, 50, 250, 210, "precision", "center error threshold (px)",
                 50.0, precision_series);
    render_panel(svg, 350, 50, 250, 210, "success", "overlap threshold", 1.0,
                 success_series);
    svg += "</svg>\n";

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << svg;
}

void write_plots_svg(const OpeResult& r, const std::string& path) {
    CurveSeries prec{"p@20=" + std::to_string(r.precision20), "#1f77b4", {}, {}};
    for (int t = 0; t < kPrecisionThresholds; ++t) {
        prec.xs.push_back(t);
        prec.ys.push_back(r.precision[t]);
    }
    CurveSeries succ{"auc=" + std::to_string(r.auc), "#1f77b4", {}, {}};
    for (int k = 0; k < kSuccessThresholds; ++k) {
        succ.xs.push_back(k / 20.0);
        succ.ys.push_back(r.success[k]);
    }
    write_plots_svg(path, r.sequence, {prec}, {succ});
}

}  // namespace crest
