#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyobs/json_util.hpp"

namespace polyobs {

// FNV-1a over the file bytes, hex-encoded. Used to tie outputs to inputs in
// run manifests; not a cryptographic hash.
std::string hash_file(const std::string& path);
std::string hash_bytes(const std::string& bytes);

// One manifest per output directory records what produced its contents.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, hash
  std::vector<std::pair<std::string, std::string>> outputs;  // path, hash
  json options;
  std::uint64_t seed = 0;
  bool has_seed = false;

  void add_input(const std::string& path);
  // Hashes the file as it exists on disk; call after writing it.
  void add_output(const std::string& path);

  json to_json() const;
  // Writes <dir>/manifest.json.
  void write(const std::string& dir) const;
};

}  // namespace polyobs
