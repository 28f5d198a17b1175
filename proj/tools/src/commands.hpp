#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace kmrate::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

/// Bad user input detected after argument parsing.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CommandResult {
  std::string output;    // exact bytes written to --out or stdout
  int exit_code = kExitOk;
  std::string quantity;
  std::string method;
  std::string message;   // diagnostic for stderr, empty when nothing to report
};

/// Runs a subcommand from its normalized parameter object. The result depends
/// only on `params`, which is what makes manifests replayable.
CommandResult run_command(const std::string& subcommand, const json& params);

CommandResult cmd_rate(const json& params);
CommandResult cmd_ctable(const json& params);
CommandResult cmd_envelope(const json& params);
CommandResult cmd_sharpness(const json& params);
CommandResult cmd_verify(const json& params);
CommandResult cmd_solve(const json& params);

/// {quantity, value, method, params, seed, version} rendered with a trailing newline.
std::string json_document(const std::string& quantity, const json& value, const std::string& method,
                          const json& params);

/// Fixed 17-significant-digit rendering used for every CSV number.
std::string num(double x);

}  // namespace kmrate::cli
