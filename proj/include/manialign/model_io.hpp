#pragma once

#include "manialign/alignment.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace manialign::io {

inline constexpr const char* kModelVersion = "kema-model/1";

/// Matrix as {"rows", "cols", "data"} with row-major data.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const alignment::AlignmentModel& model);
alignment::AlignmentModel model_from_json(const nlohmann::json& j);

/// Writes the model with 2-space indentation and a trailing newline.
void save_model(const alignment::AlignmentModel& model, const std::filesystem::path& path);
alignment::AlignmentModel load_model(const std::filesystem::path& path);

}  // namespace manialign::io
