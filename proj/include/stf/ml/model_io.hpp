#pragma once

#include <string>

#include "stf/ml/learners.hpp"

namespace stf {

constexpr int kModelFormatVersion = 1;

std::string model_to_json(const TrainedModel& m);
/// Validates the format version, algorithm id, schema block and parameter shapes.
TrainedModel model_from_json(const std::string& text, const std::string& source = "<model>");

void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace stf
