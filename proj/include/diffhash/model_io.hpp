#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diffhash/hashcodec.hpp"

namespace diffhash {

struct InputDigest {
  std::string role;  // e.g. "desc", "pos", "neg"
  std::string path;
  std::string sha256;
  friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

struct Provenance {
  std::string created_at;
  std::vector<InputDigest> inputs;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Versioned JSON model file. Floating-point values are written in shortest
/// round-trip form, so a reloaded model encodes bit-identically.
struct ModelFile {
  static constexpr int kVersion = 1;
  HashModel model;
  Provenance provenance;
};

std::string serialize_model(const ModelFile& file);
ModelFile parse_model(const std::string& text);
void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace diffhash
