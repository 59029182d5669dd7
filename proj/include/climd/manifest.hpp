#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace climd {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Record of one command invocation, written as manifest.json next to its
/// outputs. Everything but `timestamp` is a pure function of the inputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::map<std::string, std::string> output_digests;
  std::vector<std::uint64_t> seeds;
  std::string tool_version = CLIMD_VERSION;
  std::string timestamp;

  /// sha256 over command + config, the identity of the run.
  std::string config_digest() const;
  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace climd
