#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kmrate/km_core.hpp"
#include "kmrate/special_fn.hpp"
#include "kmrate/version.hpp"
#include "manifest.hpp"

using namespace kmrate::cli;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::string manifest;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Write output here instead of stdout; the manifest goes to <out>.manifest.json");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Manifest path when --out is not given (default: stderr)");
}

json with_common(json params, const Common& c) {
  params["seed"] = c.seed;
  params["format"] = c.format;
  return params;
}

std::size_t default_cases(const std::string& suite) {
  if (suite == "catalan") return 31;
  if (suite == "turan") return 200;
  if (suite == "identity_hilbert") return 10000;
  if (suite == "triple_agreement") return 100;
  return 1000;
}

json load_operator(const std::string& text) {
  std::string body = text;
  if (!text.empty() && text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw UsageError("cannot open operator file: " + text.substr(1));
    std::stringstream buffer;
    buffer << in.rdbuf();
    body = buffer.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("--operator is not valid JSON: ") + e.what());
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  } else {
    write_text(out, text);
  }
}

int execute(const std::string& subcommand, const json& params, const Common& c) {
  const auto result = run_command(subcommand, params);
  emit(result.output, c.out);
  if (!result.message.empty()) std::cerr << "kmrate " << subcommand << ": " << result.message << "\n";
  const auto manifest = make_manifest(subcommand, params, result).to_json().dump(2) + "\n";
  if (!c.out.empty()) {
    write_text(c.out + ".manifest.json", manifest);
  } else if (!c.manifest.empty()) {
    write_text(c.manifest, manifest);
  } else {
    std::cerr << manifest;
  }
  return result.exit_code;
}

int replay(const std::string& path, const std::string& out) {
  const auto manifest = read_manifest(path);
  if (manifest.version != kmrate::kVersion) {
    std::cerr << "kmrate replay: manifest written by version " << manifest.version << ", running "
              << kmrate::kVersion << "\n";
  }
  const auto result = run_command(manifest.subcommand, manifest.params);
  emit(result.output, out);
  const auto got = digest(result.output);
  if (got != manifest.output_digest) {
    std::cerr << "kmrate replay: output digest " << got << " does not match manifest " << manifest.output_digest << "\n";
    return kExitViolation;
  }
  std::cerr << "kmrate replay: reproduced " << manifest.output_bytes << " bytes (" << got << ")\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krasnosel'skii-Mann rate bounds and numerical checks"};
  app.set_version_flag("--version", std::string(kmrate::kVersion));
  app.require_subcommand(1);

  Common common;
  std::string schedule = "const:0.5";
  std::size_t n = 0;

  auto* rate = app.add_subcommand("rate", "Rate product sqrt(sum alpha(1-alpha)) * P^n for a schedule");
  std::string method = "exact";
  std::uint64_t trials = 100000;
  unsigned shards = 1;
  rate->add_option("--schedule", schedule, "const:A[:LEN] | two-block:M[,U] | uniform-random[:LEN] | file:PATH | json:{...}")
      ->capture_default_str();
  rate->add_option("--n", n, "Number of iterations")->required();
  rate->add_option("--method", method)->check(CLI::IsMember({"recursion", "exact", "mc"}))->capture_default_str();
  rate->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
  rate->add_option("--shards", shards, "Monte Carlo worker threads")->check(CLI::Range(1U, 256U))->capture_default_str();
  add_common(rate, common);

  auto* ctable = app.add_subcommand("ctable", "Triangle of c_mn values");
  bool check = false;
  std::string table = "reference";
  ctable->add_option("--schedule", schedule)->capture_default_str();
  ctable->add_option("--n", n, "Largest n (<= 200)")->required();
  ctable->add_flag("--check", check, "Append the recurrence residual and fail if it exceeds 1e-10");
  ctable->add_option("--table", table)->check(CLI::IsMember({"reference", "fast"}))->capture_default_str();
  add_common(ctable, common);

  auto* envelope = app.add_subcommand("envelope", "Bessel envelope h(z) on a log grid");
  double z_min = 0.01;
  double z_max = 700.0;
  std::size_t points = 200;
  envelope->add_option("--z-min", z_min)->capture_default_str();
  envelope->add_option("--z-max", z_max)->capture_default_str();
  envelope->add_option("--points", points)->capture_default_str();
  add_common(envelope, common);

  auto* sharp = app.add_subcommand("sharpness", "Right-shift sharpness experiment on l^1");
  std::vector<std::size_t> ms{1, 10, 100, 500};
  std::optional<double> u;
  sharp->add_option("--m", ms, "Block sizes (comma separated, <= 5000)")->delimiter(',')->capture_default_str();
  sharp->add_option("--u", u, "Block parameter (default: the eta-optimal value)");
  add_common(sharp, common);

  auto* verify = app.add_subcommand("verify", "Run a property suite and report each case");
  std::string suite;
  std::optional<std::size_t> cases;
  verify->add_option("--suite", suite)
      ->required()
      ->check(CLI::IsMember({"hoeffding", "catalan", "turan", "identity_hilbert", "triple_agreement"}));
  verify->add_option("--cases", cases, "Number of cases (suite-specific default)");
  verify->add_option("--trials", trials, "Monte Carlo trials for triple_agreement")->capture_default_str();
  add_common(verify, common);

  auto* solve = app.add_subcommand("solve", "Run the iteration on a declared operator and certify the residuals");
  std::string op_text;
  solve->add_option("--operator", op_text, "Operator JSON, or @path to a JSON file")->required();
  solve->add_option("--schedule", schedule)->capture_default_str();
  solve->add_option("--n", n)->required();
  add_common(solve, common);

  auto* rerun = app.add_subcommand("replay", "Re-run a manifest and check the output digest");
  std::string manifest_path;
  std::string replay_out;
  rerun->add_option("manifest", manifest_path, "Manifest file")->required();
  rerun->add_option("--out", replay_out, "Write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rerun->parsed()) return replay(manifest_path, replay_out);
    if (rate->parsed()) {
      return execute("rate", with_common({{"schedule", schedule}, {"n", n}, {"method", method}, {"trials", trials},
                                          {"shards", shards}},
                                         common),
                     common);
    }
    if (ctable->parsed()) {
      return execute("ctable", with_common({{"schedule", schedule}, {"n", n}, {"check", check}, {"table", table}}, common),
                     common);
    }
    if (envelope->parsed()) {
      return execute("envelope", with_common({{"z_min", z_min}, {"z_max", z_max}, {"points", points}}, common), common);
    }
    if (sharp->parsed()) {
      return execute("sharpness", with_common({{"m", ms}, {"u", u ? json(*u) : json(nullptr)}}, common), common);
    }
    if (verify->parsed()) {
      json params{{"suite", suite}, {"cases", cases.value_or(default_cases(suite))}};
      if (suite == "triple_agreement") params["trials"] = trials;
      return execute("verify", with_common(std::move(params), common), common);
    }
    if (solve->parsed()) {
      return execute("solve",
                     with_common({{"operator", load_operator(op_text)}, {"schedule", schedule}, {"n", n}}, common),
                     common);
    }
  } catch (const kmrate::km::BoundViolation& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitViolation;
  } catch (const kmrate::special_fn::BesselOverflow& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "kmrate: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
