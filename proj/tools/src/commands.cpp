#include "commands.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "kmrate/bounds.hpp"
#include "kmrate/experiment.hpp"
#include "kmrate/km_core.hpp"
#include "kmrate/stochastic.hpp"
#include "kmrate/version.hpp"

namespace kmrate::cli {

namespace {

constexpr std::size_t kReferenceTableLimit = 200;

bool csv(const json& params) { return params.value("format", std::string("json")) == "csv"; }

std::uint64_t seed_of(const json& params) { return params.value("seed", std::uint64_t{0}); }

StepSchedule load_schedule(const json& params, std::size_t min_length) {
  return experiment::parse_schedule_source(params.at("schedule").get<std::string>(), min_length, seed_of(params));
}

void require_length(const StepSchedule& sched, std::size_t needed, const char* what) {
  if (sched.size() < needed) {
    throw UsageError(fmt::format("schedule has {} steps but {} needs {}", sched.size(), what, needed));
  }
}

}  // namespace

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string json_document(const std::string& quantity, const json& value, const std::string& method,
                          const json& params) {
  const json doc{{"quantity", quantity}, {"value", value},      {"method", method},
                 {"params", params},     {"seed", seed_of(params)}, {"version", kVersion}};
  return doc.dump(2) + "\n";
}

CommandResult cmd_rate(const json& params) {
  const auto n = params.at("n").get<std::size_t>();
  const auto method = params.at("method").get<std::string>();
  const auto sched = load_schedule(params, n + 1);
  require_length(sched, n, "--n");

  CommandResult r;
  r.quantity = "rate";
  bounds::RateReport report;
  std::optional<stochastic::McEstimate> mc;
  if (method == "exact") {
    report = bounds::rate_report(sched, n);
    r.method = "exact";
  } else if (method == "recursion") {
    require_length(sched, n + 1, "--method recursion");
    if (sched.alpha(n + 1) == 0.0) {
      report = bounds::rate_report(sched, n);
      r.method = "exact";
      r.message = "alpha_{n+1} = 0: P^n reported by the exact route";
    } else {
      const bool small = n + 1 <= kReferenceTableLimit;
      const auto table = small ? bounds::CTableMethod::reference : bounds::CTableMethod::fast;
      report = bounds::rate_report_from(sched, n, bounds::pn_recursion(sched, n, table));
      r.method = small ? "recursion" : "recursion-fast";
    }
  } else if (method == "mc") {
    const auto trials = params.at("trials").get<std::uint64_t>();
    const auto shards = params.value("shards", 1U);
    if (trials == 0) throw UsageError("--trials must be positive");
    mc = stochastic::simulate_walk_nonneg(sched, n, trials, RngStream{seed_of(params), 0}, shards);
    report = bounds::rate_report_from(sched, n, mc->estimate);
    // Sampling noise alone must not flag a violation: allow four standard errors.
    const double margin = 4.0 * std::sqrt(report.sum_s) * mc->std_err;
    report.bound_ok = report.product - margin <= std::numbers::inv_sqrtpi + bounds::kBoundTolerance;
    r.method = "mc";
  } else {
    throw UsageError("unknown method: " + method);
  }

  if (csv(params)) {
    r.output = mc ? "n,sum_s,pn,product,bound_ok,std_err,trials\n" : "n,sum_s,pn,product,bound_ok\n";
    r.output += fmt::format("{},{},{},{},{}", report.n, num(report.sum_s), num(report.pn), num(report.product),
                            report.bound_ok ? "true" : "false");
    if (mc) r.output += fmt::format(",{},{}", num(mc->std_err), mc->trials);
    r.output += "\n";
  } else {
    json value{{"n", report.n},
               {"sum_s", report.sum_s},
               {"pn", report.pn},
               {"product", report.product},
               {"bound_ok", report.bound_ok}};
    if (mc) {
      value["std_err"] = mc->std_err;
      value["trials"] = mc->trials;
    }
    r.output = json_document(r.quantity, value, r.method, params);
  }
  if (!report.bound_ok) {
    r.exit_code = kExitViolation;
    r.message = fmt::format("rate bound violated: product {} exceeds 1/sqrt(pi)", num(report.product));
  }
  return r;
}

CommandResult cmd_ctable(const json& params) {
  const auto n_max = params.at("n").get<std::size_t>();
  if (n_max > kReferenceTableLimit) throw UsageError("ctable: --n must be <= 200");
  const auto method_name = params.value("table", std::string("reference"));
  bounds::CTableMethod method;
  if (method_name == "reference") {
    method = bounds::CTableMethod::reference;
  } else if (method_name == "fast") {
    method = bounds::CTableMethod::fast;
  } else {
    throw UsageError("unknown table method: " + method_name);
  }
  const auto sched = load_schedule(params, n_max);
  require_length(sched, n_max, "--n");
  const auto table = bounds::c_table(sched, n_max, method);
  const bool check = params.value("check", false);
  const double residual = check ? bounds::recurrence_check(table, sched) : 0.0;

  CommandResult r;
  r.quantity = "c_table";
  r.method = method_name;
  if (csv(params)) {
    r.output = "m,n,c\n";
    for (std::size_t n = 0; n <= n_max; ++n) {
      for (std::int64_t m = -1; m <= static_cast<std::int64_t>(n); ++m) {
        r.output += fmt::format("{},{},{}\n", m, n, num(table(m, n)));
      }
    }
    if (check) r.output += fmt::format("recurrence_residual,{}\n", num(residual));
  } else {
    json rows = json::array();
    for (std::size_t n = 0; n <= n_max; ++n) {
      for (std::int64_t m = -1; m <= static_cast<std::int64_t>(n); ++m) rows.push_back(json::array({m, n, table(m, n)}));
    }
    json value{{"n_max", n_max}, {"columns", {"m", "n", "c"}}, {"rows", std::move(rows)}};
    if (check) value["recurrence_residual"] = residual;
    r.output = json_document(r.quantity, value, r.method, params);
  }
  if (check && residual > bounds::kBoundTolerance) {
    r.exit_code = kExitViolation;
    r.message = fmt::format("recurrence residual {} exceeds 1e-10", num(residual));
  }
  return r;
}

CommandResult cmd_envelope(const json& params) {
  const double z_min = params.at("z_min").get<double>();
  const double z_max = params.at("z_max").get<double>();
  const auto points = params.at("points").get<std::size_t>();
  if (!(z_min > 0.0 && z_min < z_max)) throw UsageError("envelope: need 0 < --z-min < --z-max");
  if (points < 2) throw UsageError("envelope: --points must be >= 2");

  std::vector<double> z(points);
  std::vector<double> h(points);
  for (std::size_t i = 0; i < points; ++i) {
    z[i] = z_min * std::pow(z_max / z_min, static_cast<double>(i) / static_cast<double>(points - 1));
    h[i] = bounds::h_envelope(z[i]);
  }

  CommandResult r;
  r.quantity = "h_envelope";
  r.method = "scaled_bessel";
  for (std::size_t i = 1; i < points; ++i) {
    if (!(h[i] > h[i - 1])) {
      r.exit_code = kExitViolation;
      r.message = fmt::format("h is not increasing between z = {} and z = {}", num(z[i - 1]), num(z[i]));
      return r;
    }
  }
  if (csv(params)) {
    r.output = "z,h\n";
    for (std::size_t i = 0; i < points; ++i) r.output += fmt::format("{},{}\n", num(z[i]), num(h[i]));
  } else {
    r.output = json_document(r.quantity, json{{"z", z}, {"h", h}}, r.method, params);
  }
  return r;
}

CommandResult cmd_sharpness(const json& params) {
  const auto ms = params.at("m").get<std::vector<std::size_t>>();
  if (ms.empty()) throw UsageError("sharpness: at least one --m value is required");
  const double u = params.at("u").is_null() ? km::sharpness_optimal_u() : params.at("u").get<double>();
  std::vector<km::SharpnessResult> rows;
  for (auto m : ms) {
    if (m < 1 || m > 5000) throw UsageError("sharpness: m values must lie in [1, 5000]");
    rows.push_back(km::shift_sharpness_experiment(m, u));
  }

  CommandResult r;
  r.quantity = "sharpness";
  r.method = "poisson_binomial";
  if (csv(params)) {
    r.output = "m,observed,eta,gap\n";
    for (const auto& s : rows) r.output += fmt::format("{},{},{},{}\n", s.m, num(s.observed), num(s.eta), num(s.gap));
  } else {
    json list = json::array();
    for (const auto& s : rows) {
      list.push_back(json{{"m", s.m}, {"u", s.u}, {"central_mass", s.central_mass}, {"observed", s.observed},
                          {"eta", s.eta}, {"gap", s.gap}});
    }
    r.output = json_document(r.quantity, list, r.method, params);
  }
  return r;
}

namespace {

struct CertificateRow {
  std::string kind;
  bool violated = false;
  km::Certificate cert;
  std::string message;
};

template <typename Fn>
CertificateRow attempt(std::string kind, Fn&& fn) {
  CertificateRow row;
  row.kind = std::move(kind);
  try {
    row.cert = fn();
  } catch (const km::BoundViolation& e) {
    row.violated = true;
    row.message = e.what();
  }
  return row;
}

template <typename S>
std::vector<CertificateRow> certify_all(const km::IterationTrace<S>& trace, const km::Operator<S>& op,
                                        std::optional<double> dist0) {
  std::vector<CertificateRow> rows;
  if (op.declared_diameter) {
    rows.push_back(attempt("diameter_bound", [&] { return km::certify_diameter(trace, *op.declared_diameter); }));
  }
  if (dist0) {
    rows.push_back(attempt("fixpoint_bound_2rootpi",
                           [&] { return km::certify_fixpoint(trace, *dist0, km::FixpointVariant::two_over_rootpi); }));
    if (trace.hilbert) {
      rows.push_back(attempt("fixpoint_bound_hilbert",
                             [&] { return km::certify_fixpoint(trace, *dist0, km::FixpointVariant::hilbert_one); }));
      if (trace.steps() >= 1) {
        rows.push_back(attempt("shifted_hilbert", [&] {
          return km::certify_fixpoint(trace, *dist0, km::FixpointVariant::hilbert_shifted);
        }));
      }
    }
  }
  return rows;
}

template <typename Experiment>
CommandResult solve_with(const Experiment& e, const StepSchedule& sched, std::size_t n, const json& params) {
  const auto trace = km::km_iterate(e.space, e.op, e.x0, sched, n);
  const auto certs = certify_all(trace, e.op, e.dist0);

  CommandResult r;
  r.quantity = "km_trace";
  r.method = e.op.name;
  bool violated = false;
  for (const auto& c : certs) violated = violated || c.violated;

  if (csv(params)) {
    r.output = "k,residual\n";
    for (std::size_t k = 0; k < trace.residuals.size(); ++k) r.output += fmt::format("{},{}\n", k, num(trace.residuals[k]));
    for (const auto& c : certs) {
      if (c.violated) {
        r.output += fmt::format("certificate,{},violated\n", c.kind);
      } else {
        r.output += fmt::format("certificate,{},{},{}\n", c.kind, num(c.cert.value), num(c.cert.observed));
      }
    }
  } else {
    json list = json::array();
    for (const auto& c : certs) {
      if (c.violated) {
        list.push_back(json{{"kind", c.kind}, {"violated", true}, {"message", c.message}});
      } else {
        list.push_back(json{{"kind", c.kind},
                            {"value", c.cert.value},
                            {"observed", c.cert.observed},
                            {"n", c.cert.n},
                            {"sum_s", c.cert.sum_s},
                            {"constant", c.cert.constant},
                            {"scale", c.cert.scale},
                            {"trivial", c.cert.trivial},
                            {"violated", false}});
      }
    }
    json value{{"n", n}, {"residuals", trace.residuals}, {"certificates", std::move(list)}};
    if (e.dist0) value["dist0"] = *e.dist0;
    r.output = json_document(r.quantity, value, r.method, params);
  }
  if (violated) {
    r.exit_code = kExitViolation;
    r.message = "a residual exceeded its certificate";
  }
  return r;
}

}  // namespace

CommandResult cmd_solve(const json& params) {
  const auto n = params.at("n").get<std::size_t>();
  const auto sched = load_schedule(params, n);
  require_length(sched, n, "--n");
  const auto experiment = experiment::operator_from_json(params.at("operator"));
  return std::visit([&](const auto& e) { return solve_with(e, sched, n, params); }, experiment);
}

CommandResult run_command(const std::string& subcommand, const json& params) {
  if (subcommand == "rate") return cmd_rate(params);
  if (subcommand == "ctable") return cmd_ctable(params);
  if (subcommand == "envelope") return cmd_envelope(params);
  if (subcommand == "sharpness") return cmd_sharpness(params);
  if (subcommand == "verify") return cmd_verify(params);
  if (subcommand == "solve") return cmd_solve(params);
  throw UsageError("unknown subcommand: " + subcommand);
}

}  // namespace kmrate::cli
