#include "kmrate/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

namespace kmrate::stochastic {

BernoulliVector::BernoulliVector(std::vector<double> probs) : probs_(std::move(probs)) {
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("BernoulliVector: probability outside [0, 1]");
  }
}

double BernoulliVector::total() const {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

DiscreteDist::DiscreteDist(std::int64_t support_offset, std::vector<double> pmf)
    : offset_(support_offset), pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw std::invalid_argument("DiscreteDist: empty pmf");
  double total = 0.0;
  for (double w : pmf_) {
    if (!(w >= 0.0)) throw std::invalid_argument("DiscreteDist: negative or NaN mass");
    total += w;
  }
  // Accumulated rounding of an n-step convolution grows linearly in n.
  const double slack = 1e-12 + 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(pmf_.size());
  if (std::abs(total - 1.0) > slack) throw std::invalid_argument("DiscreteDist: masses do not sum to 1");
}

double DiscreteDist::mass(std::int64_t k) const {
  if (k < offset_ || k > support_max()) return 0.0;
  return pmf_[static_cast<std::size_t>(k - offset_)];
}

double DiscreteDist::total_mass() const {
  return std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
}

double DiscreteDist::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) m += pmf_[i] * static_cast<double>(offset_ + static_cast<std::int64_t>(i));
  return m;
}

ConvexIntFunction::ConvexIntFunction(std::string name, Evaluator evaluator)
    : name_(std::move(name)), evaluator_(std::move(evaluator)) {
  if (!evaluator_) throw std::invalid_argument("ConvexIntFunction: empty evaluator");
}

ConvexIntFunction ConvexIntFunction::certified(std::int64_t horizon) const {
  ConvexIntFunction out(name_, evaluator_);
  out.horizon_ = horizon;
  out.certified_ = true;
  double prev = evaluator_(0);
  double curr = evaluator_(1);
  for (std::int64_t k = 1; k <= horizon; ++k) {
    const double next = evaluator_(k + 1);
    const double scale = std::max({1.0, std::abs(prev), std::abs(curr), std::abs(next)});
    if (curr > 0.5 * (prev + next) + 1e-12 * scale) {
      out.certified_ = false;
      out.horizon_ = k - 1;
      break;
    }
    prev = curr;
    curr = next;
  }
  return out;
}

ConvexIntFunction ConvexIntFunction::square() {
  return ConvexIntFunction("k^2", [](std::int64_t k) { return static_cast<double>(k) * static_cast<double>(k); });
}

ConvexIntFunction ConvexIntFunction::identity() {
  return ConvexIntFunction("k", [](std::int64_t k) { return static_cast<double>(k); });
}

ConvexIntFunction ConvexIntFunction::ballot() {
  return ConvexIntFunction("F(k)", [](std::int64_t k) { return special_fn::ballot_F_value(static_cast<std::uint64_t>(k)); });
}

ConvexIntFunction ConvexIntFunction::ballot_pair_average() {
  return ConvexIntFunction("(F(k)+F(k+1))/2", [](std::int64_t k) {
    const auto m = static_cast<std::uint64_t>(k);
    return 0.5 * (special_fn::ballot_F_value(m) + special_fn::ballot_F_value(m + 1));
  });
}

ConvexIntFunction ConvexIntFunction::hinge(double c) {
  return ConvexIntFunction("max(k-" + std::to_string(c) + ",0)",
                           [c](std::int64_t k) { return std::max(static_cast<double>(k) - c, 0.0); });
}

DiscreteDist poisson_binomial_pmf(const BernoulliVector& p) {
  std::vector<double> pmf(p.size() + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t filled = 0;
  for (double q : p) {
    ++filled;
    for (std::size_t k = filled; k > 0; --k) pmf[k] = (1.0 - q) * pmf[k] + q * pmf[k - 1];
    pmf[0] *= 1.0 - q;
  }
  return DiscreteDist(0, std::move(pmf));
}

std::vector<special_fn::ExactRational> poisson_binomial_pmf_exact(std::span<const special_fn::ExactRational> p) {
  using special_fn::ExactRational;
  std::vector<ExactRational> pmf(p.size() + 1, ExactRational(0));
  pmf[0] = 1;
  std::size_t filled = 0;
  for (const auto& q : p) {
    if (q < 0 || q > 1) throw std::invalid_argument("poisson_binomial_pmf_exact: probability outside [0, 1]");
    ++filled;
    const ExactRational q_bar = 1 - q;
    for (std::size_t k = filled; k > 0; --k) pmf[k] = q_bar * pmf[k] + q * pmf[k - 1];
    pmf[0] *= q_bar;
  }
  return pmf;
}

TruncatedPoisson poisson_truncated(double z, double tail_eps) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw std::domain_error("poisson_truncated: z must be finite and >= 0");
  if (!(tail_eps > 0.0 && tail_eps <= 1e-6)) throw std::domain_error("poisson_truncated: tail_eps must lie in (0, 1e-6]");
  if (z == 0.0) return TruncatedPoisson{DiscreteDist::point_mass(0), 0};

  // Chernoff: P(Z >= K) <= e^{-z} (e z / K)^K for K > z.
  const double log_eps = std::log(tail_eps);
  auto log_bound = [z](double k) { return -z + k * (1.0 + std::log(z) - std::log(k)); };
  auto k = static_cast<std::int64_t>(std::floor(z)) + 1;
  while (log_bound(static_cast<double>(k)) >= log_eps) ++k;

  std::vector<double> pmf(static_cast<std::size_t>(k) + 1);
  if (z < 700.0) {
    pmf[0] = std::exp(-z);
    for (std::size_t i = 1; i < pmf.size(); ++i) pmf[i] = pmf[i - 1] * z / static_cast<double>(i);
  } else {
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const double d = static_cast<double>(i);
      pmf[i] = std::exp(-z + d * std::log(z) - std::lgamma(d + 1.0));
    }
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (auto& w : pmf) w /= total;
  return TruncatedPoisson{DiscreteDist(0, std::move(pmf)), k};
}

double expect(const DiscreteDist& dist, const ConvexIntFunction& g) {
  const auto pmf = dist.pmf();
  double sum = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] == 0.0) continue;
    sum += pmf[i] * g(dist.support_offset() + static_cast<std::int64_t>(i));
  }
  return sum;
}

MajorizationResult hoeffding_majorization_check(const BernoulliVector& p, const ConvexIntFunction& g) {
  const auto poisson = poisson_truncated(p.total(), kPoissonTailEps);
  const auto required = static_cast<std::int64_t>(p.size()) + poisson.truncation_point;
  if (!g.certified_convex() || g.certified_horizon() < required) {
    throw std::invalid_argument("hoeffding_majorization_check: g is not certified convex on {0.." +
                                std::to_string(required) + "}");
  }
  MajorizationResult r;
  r.lhs = expect(poisson_binomial_pmf(p), g);
  r.rhs = expect(poisson.dist, g);
  r.holds = r.lhs <= r.rhs + kMajorizationSlack;
  return r;
}

BernoulliVector split_bernoulli(const BernoulliVector& p, std::size_t i) {
  if (i >= p.size()) throw std::out_of_range("split_bernoulli: index out of range");
  std::vector<double> out(p.begin(), p.end());
  out[i] = 0.5 * p[i];
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(i) + 1, 0.5 * p[i]);
  return BernoulliVector(std::move(out));
}

namespace {

// Runs `trial(engine)` over `trials` draws split across shards and merges counts.
template <typename Trial>
McEstimate run_sharded(std::uint64_t trials, const RngStream& rng, unsigned shards, const Trial& trial) {
  if (trials == 0) throw std::invalid_argument("simulate: trials must be >= 1");
  if (shards == 0) shards = 1;
  std::vector<std::uint64_t> successes(shards, 0);
  auto work = [&](unsigned s) {
    const std::uint64_t share = trials / shards + (s < trials % shards ? 1 : 0);
    RngEngine engine(rng.substream(s));
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < share; ++t) hits += trial(engine) ? 1 : 0;
    successes[s] = hits;
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) workers.emplace_back(work, s);
  }
  McEstimate est;
  est.trials = trials;
  est.successes = std::accumulate(successes.begin(), successes.end(), std::uint64_t{0});
  est.estimate = static_cast<double>(est.successes) / static_cast<double>(trials);
  est.std_err = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

}  // namespace

McEstimate simulate_walk_nonneg(const StepSchedule& alphas, std::size_t n, std::uint64_t trials,
                                const RngStream& rng, unsigned shards) {
  if (n > alphas.size()) throw std::out_of_range("simulate_walk_nonneg: n exceeds schedule length");
  if (n == 0) return McEstimate{1.0, 0.0, trials, trials};
  const auto a = alphas.alphas();
  return run_sharded(trials, rng, shards, [a, n](RngEngine& engine) {
    std::int64_t partial = 0;
    for (std::size_t k = n; k >= 1; --k) {
      const int fox = engine.bernoulli(a[k - 1]) ? 1 : 0;
      const int hare = engine.bernoulli(a[k - 1]) ? 1 : 0;
      partial += fox - hare;
      if (partial < 0) return false;
    }
    return true;
  });
}

McEstimate simulate_fox_hare(const StepSchedule& alphas, std::int64_t m, std::size_t n, std::uint64_t trials,
                             const RngStream& rng, unsigned shards) {
  if (m < -1 || m > static_cast<std::int64_t>(n)) throw std::invalid_argument("simulate_fox_hare: need -1 <= m <= n");
  if (n > alphas.size()) throw std::out_of_range("simulate_fox_hare: n exceeds schedule length");
  if (m == -1) return McEstimate{1.0, 0.0, trials, trials};
  const auto a = alphas.alphas();
  const auto hare_start = static_cast<std::size_t>(m);
  return run_sharded(trials, rng, shards, [a, hare_start, n](RngEngine& engine) {
    // k = m+1: the hare's sum is empty, so the fox must fall somewhere in m+1..n.
    std::int64_t fox = 0;
    for (std::size_t i = hare_start + 1; i <= n; ++i) fox += engine.bernoulli(a[i - 1]) ? 1 : 0;
    if (fox <= 0) return false;
    std::int64_t hare = 0;
    for (std::size_t k = hare_start; k >= 1; --k) {
      fox += engine.bernoulli(a[k - 1]) ? 1 : 0;
      hare += engine.bernoulli(a[k - 1]) ? 1 : 0;
      if (fox <= hare) return false;
    }
    return true;
  });
}

}  // namespace kmrate::stochastic
