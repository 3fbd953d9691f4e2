#include "calderon/dataset_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <openssl/evp.h>

#include "calderon/error.hpp"

namespace calderon {

static_assert(std::endian::native == std::endian::little, "float64-le layout assumes a little-endian host");

std::string encode_float64(const std::vector<double>& values) {
  const auto bytes = values.size() * sizeof(double);
  std::string out(4 * ((bytes + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(values.data()),
                                      static_cast<int>(bytes));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::vector<double> decode_float64(const std::string& text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kMalformedContainer, "base64 length is not a multiple of 4");
  std::string raw(3 * (text.size() / 4), '\0');
  const int decoded = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(raw.data()),
                                      reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (decoded < 0) throw Error(ErrorCode::kMalformedContainer, "invalid base64 payload");
  // EVP_DecodeBlock counts padding characters as zero bytes.
  std::size_t length = static_cast<std::size_t>(decoded);
  if (!text.empty() && text.back() == '=') --length;
  if (text.size() > 1 && text[text.size() - 2] == '=') --length;
  if (length % sizeof(double) != 0) {
    throw Error(ErrorCode::kMalformedContainer, "base64 payload is not a float64 array");
  }
  std::vector<double> values(length / sizeof(double));
  std::memcpy(values.data(), raw.data(), length);
  return values;
}

namespace {

const char* const kNodeArrays[] = {"a1", "a2", "a3", "u"};
const char* const kTimeArrays[] = {"A1", "A3"};

nlohmann::json nested(const CylinderGrid& grid, const std::vector<double>& values) {
  nlohmann::json out = nlohmann::json::array();
  std::size_t k = 0;
  for (int i = 0; i < grid.extent(0); ++i) {
    nlohmann::json plane = nlohmann::json::array();
    for (int j = 0; j < grid.extent(1); ++j) {
      nlohmann::json row = nlohmann::json::array();
      for (int l = 0; l < grid.extent(2); ++l) row.push_back(values[k++]);
      plane.push_back(std::move(row));
    }
    out.push_back(std::move(plane));
  }
  return out;
}

std::vector<double> flatten(const nlohmann::json& node, const CylinderGrid& grid, const std::string& name) {
  std::vector<double> out;
  out.reserve(grid.size());
  auto mismatch = [&] { return Error(ErrorCode::kGridMismatch, "array " + name + " does not match the grid"); };
  if (!node.is_array() || static_cast<int>(node.size()) != grid.extent(0)) throw mismatch();
  for (const auto& plane : node) {
    if (!plane.is_array() || static_cast<int>(plane.size()) != grid.extent(1)) throw mismatch();
    for (const auto& row : plane) {
      if (!row.is_array() || static_cast<int>(row.size()) != grid.extent(2)) throw mismatch();
      for (const auto& v : row) {
        if (!v.is_number()) throw Error(ErrorCode::kMalformedContainer, "non-numeric entry in " + name);
        out.push_back(v.get<double>());
      }
    }
  }
  return out;
}

std::vector<double> read_array(const nlohmann::json& arrays, const std::string& name,
                               const CylinderGrid& grid, bool node_field, bool base64) {
  if (!arrays.contains(name)) throw Error(ErrorCode::kMalformedContainer, "missing array " + name);
  const auto& entry = arrays.at(name);
  const std::size_t expected = node_field ? grid.size() : static_cast<std::size_t>(grid.nt());
  std::vector<double> values;
  if (base64) {
    if (!entry.is_string()) throw Error(ErrorCode::kMalformedContainer, "array " + name + " is not a base64 string");
    values = decode_float64(entry.get<std::string>());
  } else if (node_field) {
    values = flatten(entry, grid, name);
  } else {
    if (!entry.is_array()) throw Error(ErrorCode::kMalformedContainer, "array " + name + " is not a list");
    for (const auto& v : entry) {
      if (!v.is_number()) throw Error(ErrorCode::kMalformedContainer, "non-numeric entry in " + name);
      values.push_back(v.get<double>());
    }
  }
  if (values.size() != expected) throw Error(ErrorCode::kGridMismatch, "array " + name + " has the wrong length");
  return values;
}

template <typename T>
T field(const nlohmann::json& meta, const char* key) {
  if (!meta.contains(key)) throw Error(ErrorCode::kMalformedContainer, std::string("metadata lacks ") + key);
  try {
    return meta.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kMalformedContainer, std::string("metadata field ") + key + " has the wrong type");
  }
}

}  // namespace

nlohmann::json dataset_to_json(const MillerDataset& data, ArrayEncoding encoding) {
  data.check_shapes();
  if (encoding == ArrayEncoding::kAuto) {
    encoding = data.grid.size() < kNestedNodeLimit ? ArrayEncoding::kNested : ArrayEncoding::kBase64;
  }
  const bool b64 = encoding == ArrayEncoding::kBase64;
  nlohmann::json doc;
  doc["metadata"] = {{"n", 3},
                     {"N_t", data.grid.nt()},
                     {"N_ang", data.grid.angular_extents()},
                     {"T", data.T},
                     {"rho", data.rho},
                     {"alpha", data.alpha},
                     {"layout", "row-major"},
                     {"dtype", "float64-le"},
                     {"encoding", b64 ? "base64" : "nested"}};
  const std::vector<double>* node_fields[] = {&data.a1, &data.a2, &data.a3, &data.u};
  const std::vector<double>* time_fields[] = {&data.A1, &data.A3};
  nlohmann::json arrays;
  for (int k = 0; k < 4; ++k) {
    arrays[kNodeArrays[k]] = b64 ? nlohmann::json(encode_float64(*node_fields[k])) : nested(data.grid, *node_fields[k]);
  }
  for (int k = 0; k < 2; ++k) {
    arrays[kTimeArrays[k]] = b64 ? nlohmann::json(encode_float64(*time_fields[k])) : nlohmann::json(*time_fields[k]);
  }
  doc["arrays"] = std::move(arrays);
  return doc;
}

MillerDataset dataset_from_json(const nlohmann::json& doc, const std::optional<CylinderGrid>& expected) {
  if (!doc.is_object() || !doc.contains("metadata") || !doc.contains("arrays")) {
    throw Error(ErrorCode::kMalformedContainer, "container needs metadata and arrays");
  }
  const auto& meta = doc.at("metadata");
  if (field<int>(meta, "n") != 3) throw Error(ErrorCode::kMalformedContainer, "dataset must have n = 3");
  if (field<std::string>(meta, "layout") != "row-major") {
    throw Error(ErrorCode::kMalformedContainer, "layout must be row-major");
  }
  if (field<std::string>(meta, "dtype") != "float64-le") {
    throw Error(ErrorCode::kMalformedContainer, "dtype must be float64-le");
  }
  const auto angular = field<std::vector<int>>(meta, "N_ang");
  if (angular.size() != 2) throw Error(ErrorCode::kMalformedContainer, "N_ang must have two entries");
  const std::string encoding = meta.value("encoding", "base64");
  if (encoding != "base64" && encoding != "nested") {
    throw Error(ErrorCode::kMalformedContainer, "unknown encoding " + encoding);
  }
  MillerDataset data;
  try {
    data.grid = CylinderGrid(field<int>(meta, "N_t"), angular);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedContainer, std::string("invalid grid header: ") + e.what());
  }
  if (expected && !(*expected == data.grid)) {
    throw Error(ErrorCode::kGridMismatch, "dataset grid " + data.grid.id() + " differs from " + expected->id());
  }
  data.T = field<double>(meta, "T");
  data.rho = field<double>(meta, "rho");
  data.alpha = field<double>(meta, "alpha");
  if (!(data.T > 0.0 && data.T <= 1.0) || !(data.alpha > 0.0 && data.alpha < 1.0)) {
    throw Error(ErrorCode::kMalformedContainer, "T must lie in (0, 1] and alpha in (0, 1)");
  }
  const auto& arrays = doc.at("arrays");
  const bool b64 = encoding == "base64";
  data.a1 = read_array(arrays, "a1", data.grid, true, b64);
  data.a2 = read_array(arrays, "a2", data.grid, true, b64);
  data.a3 = read_array(arrays, "a3", data.grid, true, b64);
  data.u = read_array(arrays, "u", data.grid, true, b64);
  data.A1 = read_array(arrays, "A1", data.grid, false, b64);
  data.A3 = read_array(arrays, "A3", data.grid, false, b64);
  return data;
}

void save_dataset(const MillerDataset& data, const std::filesystem::path& path, ArrayEncoding encoding) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp);
    out << dataset_to_json(data, encoding).dump() << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

LoadedDataset load_dataset(const std::filesystem::path& path, const std::optional<CylinderGrid>& expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedContainer, std::string("not a JSON document: ") + e.what());
  }
  MillerDataset data = dataset_from_json(doc, expected);
  ValidationReport report = validate_miller_properties(data);
  return {std::move(data), std::move(report)};
}

}  // namespace calderon
