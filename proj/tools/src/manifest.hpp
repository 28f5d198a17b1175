#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace kmrate::cli {

/// Everything needed to re-run a subcommand and check that it reproduces.
struct RunManifest {
  std::string subcommand;
  json params;
  std::uint64_t seed = 0;
  std::string version;
  std::string quantity;
  std::string method;
  std::string output_digest;
  std::size_t output_bytes = 0;
  int exit_code = 0;

  json to_json() const;
  static RunManifest from_json(const json& j);
};

/// FNV-1a 64-bit digest of the bytes, as "fnv1a64:<16 hex digits>".
std::string digest(const std::string& bytes);

RunManifest make_manifest(const std::string& subcommand, const json& params, const CommandResult& result);

RunManifest read_manifest(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace kmrate::cli
