#include "polyobs/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyobs/errors.hpp"
#include "polyobs/rng.hpp"
#include "polyobs/version.hpp"

namespace polyobs {

std::string hash_bytes(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return std::string("fnv1a64:") + buf;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for hashing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return hash_bytes(ss.str());
}

void RunManifest::add_input(const std::string& path) { inputs.emplace_back(path, hash_file(path)); }

void RunManifest::add_output(const std::string& path) { outputs.emplace_back(path, hash_file(path)); }

json RunManifest::to_json() const {
  json j;
  j["tool"] = "polyobs";
  j["version"] = kVersion;
  j["command"] = command;
  json in = json::object(), out = json::object();
  for (const auto& [p, h] : inputs) in[p] = h;
  for (const auto& [p, h] : outputs) out[p] = h;
  j["inputs"] = in;
  j["outputs"] = out;
  j["options"] = options;
  if (has_seed) j["seed"] = seed;
  return j;
}

void RunManifest::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  save_json_file((std::filesystem::path(dir) / "manifest.json").string(), to_json());
}

}  // namespace polyobs
