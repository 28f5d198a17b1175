#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "kmrate/version.hpp"

namespace kmrate::cli {

json RunManifest::to_json() const {
  return json{{"subcommand", subcommand},
              {"params", params},
              {"seed", seed},
              {"version", version},
              {"outputs", json::array({json{{"quantity", quantity}, {"method", method}}})},
              {"output_digest", output_digest},
              {"output_bytes", output_bytes},
              {"exit_code", exit_code}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.params = j.at("params");
    m.seed = j.value("seed", std::uint64_t{0});
    m.version = j.value("version", std::string{});
    if (j.contains("outputs") && !j.at("outputs").empty()) {
      m.quantity = j.at("outputs").at(0).value("quantity", std::string{});
      m.method = j.at("outputs").at(0).value("method", std::string{});
    }
    m.output_digest = j.at("output_digest").get<std::string>();
    m.output_bytes = j.value("output_bytes", std::size_t{0});
    m.exit_code = j.value("exit_code", 0);
    return m;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

RunManifest make_manifest(const std::string& subcommand, const json& params, const CommandResult& result) {
  RunManifest m;
  m.subcommand = subcommand;
  m.params = params;
  m.seed = params.value("seed", std::uint64_t{0});
  m.version = kVersion;
  m.quantity = result.quantity;
  m.method = result.method;
  m.output_digest = digest(result.output);
  m.output_bytes = result.output.size();
  m.exit_code = result.exit_code;
  return m;
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open manifest: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return RunManifest::from_json(json::parse(buffer.str()));
  } catch (const json::parse_error& e) {
    throw UsageError("manifest " + path + " is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw UsageError("failed writing " + path);
}

}  // namespace kmrate::cli
