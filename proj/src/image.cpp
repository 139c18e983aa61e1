#include "crest/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#ifdef CREST_HAS_PNG
#include <png.h>
#endif

namespace crest {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Bilinear sample of one channel at continuous coordinate (u, v) in the
// half-pixel convention; border replicated.
double sample_bilinear(const Frame& f, double u, double v, int c) {
    const double x = u - 0.5;
    const double y = v - 0.5;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double tx = x - x0;
    const double ty = y - y0;
    const int xa = clampi(x0, 0, f.width - 1);
    const int xb = clampi(x0 + 1, 0, f.width - 1);
    const int ya = clampi(y0, 0, f.height - 1);
    const int yb = clampi(y0 + 1, 0, f.height - 1);
    const double top = (1.0 - tx) * f.px(ya, xa, c) + tx * f.px(ya, xb, c);
    const double bot = (1.0 - tx) * f.px(yb, xa, c) + tx * f.px(yb, xb, c);
    return (1.0 - ty) * top + ty * bot;
}

int read_pnm_int(std::istream& in) {
    int ch = in.get();
    while (ch == '#' || std::isspace(ch)) {
        if (ch == '#')
            while (ch != '\n' && ch != EOF) ch = in.get();
        ch = in.get();
    }
    int value = 0;
    bool any = false;
    while (std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) throw IoError("pnm: expected integer in header");
    return value;
}

Frame load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw IoError("unsupported PNM magic in " + path);
    const int channels = magic[1] == '6' ? 3 : 1;
    const int w = read_pnm_int(in);
    const int h = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    if (maxval != 255) throw IoError("pnm: only maxval 255 supported in " + path);
    Frame f(h, w, channels);
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw IoError("pnm: truncated pixel data in " + path);
    return f;
}

#ifdef CREST_HAS_PNG
Frame load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open image: " + path);
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (fp) std::fclose(fp);
        throw IoError("png: allocation failure for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("png: decode failure in " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    png_byte color = png_get_color_type(png, info);
    png_byte depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("png: unsupported channel count in " + path);
    }
    Frame f(static_cast<int>(h), static_cast<int>(w), channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = f.pixels.data() + static_cast<size_t>(y) * w * channels;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return f;
}
#endif

}  // namespace

Frame crop_patch(const Frame& frame, double center_x, double center_y,
                 double size_w, double size_h, int out_w, int out_h) {
    if (frame.empty()) throw ArgumentError("crop_patch: empty frame");
    if (!(size_w > 0.0) || !(size_h > 0.0))
        throw ArgumentError("crop_patch: window size must be positive, got " +
                            std::to_string(size_w) + "x" + std::to_string(size_h));
    if (out_w <= 0 || out_h <= 0)
        throw ArgumentError("crop_patch: output size must be positive, got " +
                            std::to_string(out_w) + "x" + std::to_string(out_h));

    Frame out(out_h, out_w, frame.channels);
    const double left = center_x - size_w / 2.0;
    const double top = center_y - size_h / 2.0;
    const double sx = size_w / out_w;
    const double sy = size_h / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double v = top + (oy + 0.5) * sy;
        for (int ox = 0; ox < out_w; ++ox) {
            const double u = left + (ox + 0.5) * sx;
            for (int c = 0; c < frame.channels; ++c) {
                double s = sample_bilinear(frame, u, v, c);
                out.px(oy, ox, c) =
                    static_cast<uint8_t>(clampi(static_cast<int>(std::lround(s)), 0, 255));
            }
        }
    }
    return out;
}

Frame load_image(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "ppm" || ext == "pgm" || ext == "pnm") return load_pnm(path);
#ifdef CREST_HAS_PNG
    if (ext == "png") return load_png(path);
#else
    if (ext == "png")
        throw IoError("png support not built in; convert to ppm: " + path);
#endif
    throw IoError("unsupported image format '" + ext + "': " + path);
}

void save_ppm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    out << (frame.channels == 3 ? "P6" : "P5") << "\n"
        << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IoError("short write: " + path);
}

}  // namespace crest
