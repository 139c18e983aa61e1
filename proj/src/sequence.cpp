#include "crest/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

namespace crest {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png";
}

// Numeric value of the digits in the stem; frames sort by it, then by name.
long long numeric_stem(const fs::path& p) {
    long long v = 0;
    bool any = false;
    for (char c : p.stem().string())
        if (std::isdigit(static_cast<unsigned char>(c))) {
            v = v * 10 + (c - '0');
            any = true;
        }
    return any ? v : -1;
}

BBox parse_gt_line(const std::string& line, size_t line_no, const std::string& file) {
    std::vector<double> vals;
    std::string tok;
    for (size_t i = 0; i <= line.size(); ++i) {
        const char c = i < line.size() ? line[i] : ',';
        if (c == ',' || c == '\t' || c == ' ' || i == line.size()) {
            if (!tok.empty()) {
                try {
                    vals.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw IoError(file + ":" + std::to_string(line_no) +
                                  ": unparsable ground-truth token '" + tok + "'");
                }
                tok.clear();
            }
        } else {
            tok.push_back(c);
        }
    }
    if (vals.size() != 4)
        throw IoError(file + ":" + std::to_string(line_no) + ": expected x,y,w,h, got " +
                      std::to_string(vals.size()) + " fields");
    // 1-based corner to 0-based.
    return BBox{vals[0] - 1.0, vals[1] - 1.0, vals[2], vals[3]};
}

}  // namespace

SequenceAnnotation load_sequence(const std::string& dir) {
    const fs::path root(dir);
    if (!fs::is_directory(root))
        throw IoError("sequence directory not found: " + dir);
    const fs::path img_dir = root / "img";
    if (!fs::is_directory(img_dir))
        throw IoError("sequence has no img/ directory: " + dir);
    const fs::path gt_file = root / "groundtruth_rect.txt";
    if (!fs::exists(gt_file))
        throw IoError("sequence has no groundtruth_rect.txt: " + dir);

    SequenceAnnotation ann;
    ann.name = root.filename().string();
    if (ann.name.empty()) ann.name = root.parent_path().filename().string();

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(img_dir))
        if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        const long long na = numeric_stem(a), nb = numeric_stem(b);
        if (na != nb) return na < nb;
        return a.filename().string() < b.filename().string();
    });
    for (const auto& f : files) {
        if (!fs::exists(f)) throw IoError("missing frame file: " + f.string());
        ann.frame_paths.push_back(f.string());
    }
    if (ann.frame_paths.empty()) throw IoError("sequence has no frames: " + dir);

    std::ifstream in(gt_file);
    if (!in) throw IoError("cannot open " + gt_file.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ann.ground_truth.push_back(parse_gt_line(line, line_no, gt_file.string()));
        if (!ann.ground_truth.back().valid())
            throw IoError(gt_file.string() + ":" + std::to_string(line_no) +
                          ": non-positive box size");
    }

    if (ann.ground_truth.size() != ann.frame_paths.size())
        throw IoError(dir + ": ground-truth count " +
                      std::to_string(ann.ground_truth.size()) + " != frame count " +
                      std::to_string(ann.frame_paths.size()));

    const fs::path attr_file = root / "attributes.txt";
    if (fs::exists(attr_file)) {
        std::ifstream af(attr_file);
        while (std::getline(af, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) ann.attributes.push_back(line);
        }
    }
    return ann;
}

}  // namespace crest
