#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "falcon/config.hpp"
#include "falcon/interpreter.hpp"

namespace falcon {

inline constexpr int kCheckpointVersion = 1;

/// JSON container: version, config, seed, signature, signature hash and every
/// named parameter (row-major values). Doubles round-trip exactly.
std::string checkpoint_json(const ModelHandle& model);
/// Throws std::runtime_error on a version or signature-hash mismatch, or when
/// a stored parameter is missing or misshaped.
ModelHandle model_from_json(const std::string& text);

void save_checkpoint(const ModelHandle& model, const std::filesystem::path& path);
ModelHandle load_checkpoint(const std::filesystem::path& path);

/// Every checkpoint in a directory (model_*.json), ordered by file name.
std::vector<ModelHandle> load_checkpoint_dir(const std::filesystem::path& dir);

/// What a command did and what it wrote; enough to run it again.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;  // rendered TrainConfig
  std::uint64_t ontology_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0;
};

std::string manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace falcon
