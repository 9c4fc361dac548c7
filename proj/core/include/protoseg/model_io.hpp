#ifndef PROTOSEG_MODEL_IO_HPP
#define PROTOSEG_MODEL_IO_HPP

#include <filesystem>
#include <nlohmann/json.hpp>

#include "protoseg/model.hpp"

namespace protoseg {

inline constexpr const char* kModelSchemaVersion = "protoseg-model/1";

/// Model document. Prototype centers are written in original units next to
/// the standardization transform; categorical modes carry code and label.
nlohmann::json model_to_json(const ClusterModel& model);

/// Checks the structure of a "protoseg-model/1" document. Throws SchemaError
/// naming the first offending field.
void validate_model_document(const nlohmann::json& doc);

/// Inverse of model_to_json; centers are mapped back to model units.
ClusterModel model_from_json(const nlohmann::json& doc);

void save_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_model(const std::filesystem::path& path);

}  // namespace protoseg

#endif  // PROTOSEG_MODEL_IO_HPP
