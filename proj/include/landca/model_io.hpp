#pragma once

#include <filesystem>
#include <string>

#include "landca/calibration.hpp"

namespace landca {

/// Model file format (JSON). Field names are documented in docs/model_format.md.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace landca
