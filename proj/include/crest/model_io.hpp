#pragma once

#include <string>

#include "crest/model.hpp"

namespace crest {

// Model snapshots use the crest-tensors container (tensor_io.hpp) and carry
// weights, biases, Adam moments and step counters, and the frozen temporal
// input, so runs can be resumed and diffed byte-for-byte.
void save_model(const CrestModel& model, const std::string& path);
CrestModel load_model(const std::string& path);

}  // namespace crest
