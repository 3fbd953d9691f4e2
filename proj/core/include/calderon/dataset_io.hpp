#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "calderon/miller.hpp"

namespace calderon {

enum class ArrayEncoding { kAuto, kBase64, kNested };

/// Grids below this node count are written as nested arrays under kAuto.
inline constexpr std::size_t kNestedNodeLimit = 64 * 64 * 64;

nlohmann::json dataset_to_json(const MillerDataset& data, ArrayEncoding encoding = ArrayEncoding::kAuto);
/// Throws MalformedContainer on schema errors and GridMismatch when array
/// shapes disagree with the header (or with `expected`).
MillerDataset dataset_from_json(const nlohmann::json& doc,
                                const std::optional<CylinderGrid>& expected = std::nullopt);

void save_dataset(const MillerDataset& data, const std::filesystem::path& path,
                  ArrayEncoding encoding = ArrayEncoding::kAuto);

struct LoadedDataset {
  MillerDataset data;
  ValidationReport report;
};

/// Parses and validates; property violations are reported, not thrown.
LoadedDataset load_dataset(const std::filesystem::path& path,
                           const std::optional<CylinderGrid>& expected = std::nullopt);

/// Little-endian float64 array as standard base64.
std::string encode_float64(const std::vector<double>& values);
std::vector<double> decode_float64(const std::string& text);

}  // namespace calderon
