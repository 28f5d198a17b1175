#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kmrate/rng.hpp"

namespace kmrate {

/// Relaxation parameters alpha_1..alpha_N of a Krasnosel'skii-Mann run, each in [0, 1].
/// Index 0 is reserved for the convention alpha_0 = rho_0 = 1.
class StepSchedule {
 public:
  StepSchedule() = default;
  explicit StepSchedule(std::vector<double> alphas);

  static StepSchedule constant(double alpha, std::size_t length);
  /// m steps with alpha = u/m followed by m steps with alpha = 1 - u/m.
  static StepSchedule two_block(std::size_t m, double u);
  static StepSchedule uniform_random(std::size_t length, const RngStream& rng);

  std::size_t size() const { return alphas_.size(); }
  std::span<const double> alphas() const { return alphas_; }

  /// alpha_k for 0 <= k <= size(); alpha_0 = 1.
  double alpha(std::size_t k) const { return k == 0 ? 1.0 : alphas_.at(k - 1); }
  double alpha_bar(std::size_t k) const { return 1.0 - alpha(k); }

  /// p_k = 2 alpha_k (1 - alpha_k), in [0, 1/2].
  double p(std::size_t k) const;
  std::vector<double> move_probabilities(std::size_t n) const;

  /// rho_k = prod_{j<=k} (1 - alpha_j); rho_0 = 1.
  double rho(std::size_t k) const;

  /// Sum_{i=1}^n alpha_i (1 - alpha_i).
  double sum_s(std::size_t n) const;

  StepSchedule prefix(std::size_t n) const;

 private:
  std::vector<double> alphas_;
};

}  // namespace kmrate
