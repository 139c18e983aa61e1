#include "crest/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace crest {

namespace {

static_assert(sizeof(double) == 8, "require 64-bit IEEE doubles");

void write_doubles_le(std::ostream& out, const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) {
            uint64_t bits;
            std::memcpy(&bits, &d, 8);
            char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i));
            out.write(b, 8);
        }
    }
}

void read_doubles_le(std::istream& in, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double& d : v) {
            char b[8];
            in.read(b, 8);
            uint64_t bits = 0;
            for (int i = 0; i < 8; ++i)
                bits |= static_cast<uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
            std::memcpy(&d, &bits, 8);
        }
    }
}

}  // namespace

const Tensor3& TensorFile::get(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    throw IoError("tensor file: no tensor named '" + name + "'");
}

bool TensorFile::has(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return true;
    return false;
}

void write_tensor_file(const TensorFile& tf, const std::string& path) {
    nlohmann::json header = tf.meta;
    header["container"] = "crest-tensors";
    header["version"] = 1;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [name, t] : tf.tensors)
        list.push_back({{"name", name}, {"shape", {t.channels, t.height, t.width}}});
    header["tensors"] = list;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write tensor file: " + path);
    out << header.dump() << "\n";
    for (const auto& [name, t] : tf.tensors) write_doubles_le(out, t.data);
    if (!out) throw IoError("short write: " + path);
}

TensorFile read_tensor_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw IoError("tensor file: empty file at byte 0: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("tensor file: header parse error at byte " +
                      std::to_string(e.byte) + ": " + path);
    }
    if (!header.is_object() || header.value("container", "") != "crest-tensors")
        throw IoError("tensor file: not a crest-tensors container: " + path);
    if (header.value("version", 0) != 1)
        throw IoError("tensor file: unsupported version: " + path);
    if (!header.contains("tensors") || !header["tensors"].is_array())
        throw IoError("tensor file: missing tensors list: " + path);

    TensorFile tf;
    size_t offset = line.size() + 1;
    for (const auto& entry : header["tensors"]) {
        if (!entry.contains("name") || !entry.contains("shape") ||
            !entry["shape"].is_array() || entry["shape"].size() != 3)
            throw IoError("tensor file: malformed tensor entry at byte " +
                          std::to_string(offset) + ": " + path);
        const int c = entry["shape"][0].get<int>();
        const int h = entry["shape"][1].get<int>();
        const int w = entry["shape"][2].get<int>();
        if (c < 0 || h < 0 || w < 0)
            throw IoError("tensor file: negative shape in header: " + path);
        Tensor3 t(c, h, w);
        read_doubles_le(in, t.data);
        if (!in)
            throw IoError("tensor file: truncated payload at byte " +
                          std::to_string(offset) + " (tensor '" +
                          entry["name"].get<std::string>() + "'): " + path);
        offset += t.data.size() * 8;
        tf.add(entry["name"].get<std::string>(), std::move(t));
    }
    header.erase("tensors");
    header.erase("container");
    header.erase("version");
    tf.meta = header;
    return tf;
}

}  // namespace crest
