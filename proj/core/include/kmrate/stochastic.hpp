#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "kmrate/rng.hpp"
#include "kmrate/schedule.hpp"
#include "kmrate/special_fn.hpp"

namespace kmrate::stochastic {

/// Success probabilities p_1..p_n of independent Bernoulli variables.
class BernoulliVector {
 public:
  BernoulliVector() = default;
  explicit BernoulliVector(std::vector<double> probs);
  BernoulliVector(std::initializer_list<double> probs) : BernoulliVector(std::vector<double>(probs)) {}

  std::size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }
  double total() const;

  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

 private:
  std::vector<double> probs_;
};

/// Finite law on the integers {offset, ..., offset + pmf.size() - 1}.
class DiscreteDist {
 public:
  DiscreteDist() : DiscreteDist(0, {1.0}) {}
  DiscreteDist(std::int64_t support_offset, std::vector<double> pmf);

  static DiscreteDist point_mass(std::int64_t k) { return DiscreteDist(k, {1.0}); }

  std::int64_t support_offset() const { return offset_; }
  std::int64_t support_max() const { return offset_ + static_cast<std::int64_t>(pmf_.size()) - 1; }
  std::span<const double> pmf() const { return pmf_; }
  /// P(X = k); zero outside the support.
  double mass(std::int64_t k) const;
  double total_mass() const;
  double mean() const;

 private:
  std::int64_t offset_ = 0;
  std::vector<double> pmf_;
};

/// Real function on the non-negative integers, optionally certified to satisfy
/// g(k) <= (g(k-1) + g(k+1)) / 2 for 1 <= k <= horizon.
class ConvexIntFunction {
 public:
  using Evaluator = std::function<double(std::int64_t)>;

  ConvexIntFunction(std::string name, Evaluator evaluator);

  /// Checks the midpoint inequality on {1..horizon} (relative slack 1e-12) and
  /// records the outcome.
  ConvexIntFunction certified(std::int64_t horizon) const;

  double operator()(std::int64_t k) const { return evaluator_(k); }
  const std::string& name() const { return name_; }
  bool certified_convex() const { return certified_; }
  std::int64_t certified_horizon() const { return horizon_; }

  static ConvexIntFunction square();
  static ConvexIntFunction identity();
  /// (F(k) + F(k+1)) / 2 with F the ballot function.
  static ConvexIntFunction ballot_pair_average();
  static ConvexIntFunction hinge(double c);
  static ConvexIntFunction ballot();

 private:
  std::string name_;
  Evaluator evaluator_;
  bool certified_ = false;
  std::int64_t horizon_ = -1;
};

/// Law of M_1 + ... + M_n by iterative convolution, support {0..n}.
DiscreteDist poisson_binomial_pmf(const BernoulliVector& p);

/// Exact-rational convolution. Used as a test oracle for small n.
std::vector<special_fn::ExactRational> poisson_binomial_pmf_exact(
    std::span<const special_fn::ExactRational> p);

struct TruncatedPoisson {
  DiscreteDist dist;
  std::int64_t truncation_point = 0;  // K: support is {0..K}
};

/// Poisson(z) restricted to {0..K}, K the smallest integer above z with
/// e^{-z} (e z / K)^K < tail_eps, renormalized.
TruncatedPoisson poisson_truncated(double z, double tail_eps);

double expect(const DiscreteDist& dist, const ConvexIntFunction& g);

struct MajorizationResult {
  double lhs = 0.0;  // E[g(S)], S the Bernoulli sum
  double rhs = 0.0;  // E[g(Z)], Z Poisson with the same mean
  bool holds = false;
};

inline constexpr double kPoissonTailEps = 1e-12;
inline constexpr double kMajorizationSlack = 1e-10;

/// Compares E[g(S)] with E[g(Z)]. Throws std::invalid_argument when g is not
/// certified convex on {0 .. n + K}.
MajorizationResult hoeffding_majorization_check(const BernoulliVector& p, const ConvexIntFunction& g);

/// Replaces p_i with two entries p_i/2, p_i/2 (appended at position i).
BernoulliVector split_bernoulli(const BernoulliVector& p, std::size_t i);

struct McEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

/// Monte Carlo estimate of P(Sum_{i=k}^n Z_i >= 0 for k = n..1) where
/// Z_i = F_i - H_i with F_i, H_i ~ Bernoulli(alpha_i). Trials are split over
/// `shards` workers, shard s drawing from rng.substream(s).
McEstimate simulate_walk_nonneg(const StepSchedule& alphas, std::size_t n, std::uint64_t trials,
                                const RngStream& rng, unsigned shards = 1);

/// Monte Carlo estimate of the fox-and-hare probability
/// P(Sum_{i=k}^n F_i > Sum_{i=k}^m H_i for k = m+1..1). m = -1 gives 1.
McEstimate simulate_fox_hare(const StepSchedule& alphas, std::int64_t m, std::size_t n,
                             std::uint64_t trials, const RngStream& rng, unsigned shards = 1);

}  // namespace kmrate::stochastic
