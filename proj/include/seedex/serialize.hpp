#pragma once

#include "seedex/logreg.hpp"
#include "seedex/neural.hpp"
#include "seedex/train_config.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace seedex::io {

using Json = nlohmann::json;

Json to_json(const models::TrainConfig& config);
// Fields absent from `j` keep their value from `base`; unknown keys throw
// ConfigError.
models::TrainConfig train_config_from_json(const Json& j, const models::TrainConfig& base = {});

Json to_json(const models::LogRegModel& model);
models::LogRegModel logreg_from_json(const Json& j);

Json to_json(const models::NeuralModel& model);
models::NeuralModel neural_from_json(const Json& j);

// Whole-file helpers; failures throw IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace seedex::io
