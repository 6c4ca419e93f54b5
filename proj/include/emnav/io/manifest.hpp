// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "emnav/io/config.hpp"

namespace emnav::io {

inline constexpr const char* kArtifactVersion = "emnav 0.1.0";

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// SHA-256 over the sorted (relative path, file hash) pairs of a directory tree.
std::string sha256_tree(const std::filesystem::path& dir);

struct RunManifest {
  nlohmann::json config;          // RunConfig snapshot
  std::string worlds_hash;
  std::string corpus_hash;
  std::vector<std::uint64_t> seeds;
  std::string version = kArtifactVersion;
  std::string started;            // UTC, ISO 8601
  std::string finished;
  std::map<std::string, std::string> artifacts;  // path relative to the run dir -> sha256

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Current UTC time, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace emnav::io
