#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cphase/model.hpp"

namespace cphase {

using json = nlohmann::json;

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

json to_json(const SystemConfig& cfg);
SystemConfig config_from_json(const json& j);

/// Reads a JSON config; a missing or malformed file is an InvalidConfig error naming the path.
SystemConfig load_config(const std::filesystem::path& path);
void save_config(const SystemConfig& cfg, const std::filesystem::path& path);

/// Stable 64-bit FNV-1a digest of the canonical JSON form, as 16 hex digits.
std::string config_hash(const SystemConfig& cfg);
std::string fnv1a_hex(const std::string& bytes);

json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const json& j);

}  // namespace cphase
