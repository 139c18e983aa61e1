#pragma once

#include <string>
#include <vector>

#include "crest/tensor.hpp"

#include <json.hpp>

namespace crest {

// On-disk container shared by model snapshots, conv-stack weights and
// response-map dumps:
//
//   <single-line JSON header, UTF-8, terminated by '\n'>
//   <payload: count * 8 bytes, IEEE-754 float64, little-endian>
//
// The header always carries {"container":"crest-tensors","version":1,
// "tensors":[{"name":...,"shape":[c,h,w]},...]} plus a free-form "kind"
// and "meta" object. Payload tensors are concatenated in declaration
// order, channel-major row-major.
struct TensorFile {
    nlohmann::json meta;  // header minus the tensors list
    std::vector<std::pair<std::string, Tensor3>> tensors;

    void add(const std::string& name, const Tensor3& t) {
        tensors.emplace_back(name, t);
    }
    const Tensor3& get(const std::string& name) const;
    bool has(const std::string& name) const;
};

void write_tensor_file(const TensorFile& tf, const std::string& path);

// Parse errors report the byte offset of the failure.
TensorFile read_tensor_file(const std::string& path);

}  // namespace crest
