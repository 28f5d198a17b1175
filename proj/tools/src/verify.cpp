#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "kmrate/bounds.hpp"
#include "kmrate/km_core.hpp"
#include "kmrate/special_fn.hpp"
#include "kmrate/stochastic.hpp"

namespace kmrate::cli {

namespace {

struct CaseRecord {
  bool pass = true;
  std::string lhs;  // CSV rendering of the two compared quantities
  std::string rhs;
  json detail;
};

using stochastic::BernoulliVector;
using stochastic::ConvexIntFunction;

std::vector<CaseRecord> hoeffding_suite(std::size_t cases, std::uint64_t seed) {
  RngEngine engine(RngStream{seed, 0});
  std::vector<CaseRecord> out;
  for (std::size_t i = 0; i < cases; ++i) {
    std::vector<double> raw(engine.below(13));
    for (auto& q : raw) q = engine.uniform();
    const BernoulliVector p(std::move(raw));
    ConvexIntFunction g = ConvexIntFunction::square();
    switch (engine.below(4)) {
      case 0: break;
      case 1: g = ConvexIntFunction::identity(); break;
      case 2: g = ConvexIntFunction::ballot_pair_average(); break;
      default: g = ConvexIntFunction::hinge(engine.uniform(0.0, 6.0)); break;
    }
    const auto k = stochastic::poisson_truncated(p.total(), stochastic::kPoissonTailEps).truncation_point;
    const auto cert = g.certified(static_cast<std::int64_t>(p.size()) + k + 2);
    const auto res = stochastic::hoeffding_majorization_check(p, cert);
    bool split_ok = true;
    if (!p.empty()) {
      const auto split = stochastic::split_bernoulli(p, engine.below(p.size()));
      split_ok = stochastic::expect(stochastic::poisson_binomial_pmf(split), cert) >=
                 stochastic::expect(stochastic::poisson_binomial_pmf(p), cert) - 1e-12;
    }
    CaseRecord c;
    c.pass = res.holds && split_ok;
    c.lhs = num(res.lhs);
    c.rhs = num(res.rhs);
    c.detail = json{{"g", g.name()}, {"p", p.values()}, {"lhs", res.lhs}, {"rhs", res.rhs},
                    {"holds", res.holds}, {"split_monotone", split_ok}};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CaseRecord> catalan_suite(std::size_t cases) {
  std::vector<CaseRecord> out;
  for (std::size_t k = 0; k < cases; ++k) {
    const auto kk = static_cast<std::uint32_t>(k);
    const auto lhs = special_fn::catalan_alternating_sum(kk).str();
    const auto rhs = special_fn::catalan(kk).str();
    out.push_back(CaseRecord{lhs == rhs, lhs, rhs, json{{"k", k}, {"alternating_sum", lhs}, {"catalan", rhs}}});
  }
  return out;
}

std::vector<CaseRecord> turan_suite(std::size_t cases) {
  std::vector<CaseRecord> out;
  for (std::size_t i = 0; i < cases; ++i) {
    const double t = cases == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(cases - 1);
    const double z = 0.01 * std::pow(1e4, t);
    const double i0 = special_fn::bessel_I_scaled(0, z);
    const double i1 = special_fn::bessel_I_scaled(1, z);
    const double i2 = i0 - 2.0 / z * i1;
    const double lhs = i0 * i2;
    const double rhs = i1 * i1;
    const bool turan = lhs <= rhs * (1.0 + 1e-12);
    const bool key = z * i0 <= 2.0 * (1.0 + z) * i1;
    out.push_back(CaseRecord{turan && key, num(lhs), num(rhs),
                             json{{"z", z}, {"i0_i2", lhs}, {"i1_squared", rhs}, {"turan", turan}, {"envelope_key", key}}});
  }
  return out;
}

std::vector<CaseRecord> identity_suite(std::size_t cases, std::uint64_t seed) {
  std::vector<CaseRecord> out;
  const km::EuclideanSpace space{5};
  for (std::size_t i = 0; i < cases; ++i) {
    const double residual = km::hilbert_identity_check(space, 1, RngStream{seed, i});
    out.push_back(CaseRecord{residual <= 1e-10, num(residual), num(1e-10), json{{"residual", residual}}});
  }
  return out;
}

std::vector<CaseRecord> triple_suite(std::size_t cases, std::uint64_t seed, std::uint64_t trials) {
  RngEngine engine(RngStream{seed, 0});
  std::vector<CaseRecord> out;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = 1 + engine.below(20);
    std::vector<double> alphas(n + 1);
    for (auto& a : alphas) a = engine.uniform();
    const StepSchedule sched(std::move(alphas));
    const double exact = bounds::pn_exact(sched, n);
    const double rec = bounds::pn_recursion(sched, n);
    const auto mc = stochastic::simulate_walk_nonneg(sched, n, trials, RngStream{seed, i + 1});
    const bool agree = std::abs(rec - exact) <= 1e-12;
    const bool within = std::abs(mc.estimate - exact) <= 4.0 * mc.std_err || mc.estimate == exact;
    out.push_back(CaseRecord{agree && within, num(exact), num(rec),
                             json{{"n", n}, {"exact", exact}, {"recursion", rec}, {"mc", mc.estimate},
                                  {"mc_std_err", mc.std_err}}});
  }
  return out;
}

}  // namespace

CommandResult cmd_verify(const json& params) {
  const auto suite = params.at("suite").get<std::string>();
  const auto cases = params.at("cases").get<std::size_t>();
  const auto seed = params.value("seed", std::uint64_t{0});
  std::vector<CaseRecord> records;
  if (suite == "hoeffding") {
    records = hoeffding_suite(cases, seed);
  } else if (suite == "catalan") {
    records = catalan_suite(cases);
  } else if (suite == "turan") {
    records = turan_suite(cases);
  } else if (suite == "identity_hilbert") {
    records = identity_suite(cases, seed);
  } else if (suite == "triple_agreement") {
    records = triple_suite(cases, seed, params.at("trials").get<std::uint64_t>());
  } else {
    throw UsageError("unknown suite: " + suite);
  }

  std::size_t failed = 0;
  for (const auto& c : records) failed += c.pass ? 0 : 1;

  CommandResult r;
  r.quantity = "verify";
  r.method = suite;
  if (params.value("format", std::string("json")) == "csv") {
    r.output = "case,pass,lhs,rhs\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      r.output += fmt::format("{},{},{},{}\n", i, records[i].pass ? "true" : "false", records[i].lhs, records[i].rhs);
    }
  } else {
    json list = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
      json entry{{"case", i}, {"pass", records[i].pass}};
      entry.update(records[i].detail);
      list.push_back(std::move(entry));
    }
    const json value{{"suite", suite}, {"passed", records.size() - failed}, {"failed", failed}, {"cases", std::move(list)}};
    r.output = json_document(r.quantity, value, r.method, params);
  }
  if (failed > 0) {
    r.exit_code = kExitViolation;
    r.message = fmt::format("{} of {} cases failed", failed, records.size());
  }
  return r;
}

}  // namespace kmrate::cli
