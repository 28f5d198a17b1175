#include "kmrate/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmrate {

StepSchedule::StepSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    const double a = alphas_[i];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("StepSchedule: alpha_" + std::to_string(i + 1) + " outside [0, 1]");
    }
  }
}

StepSchedule StepSchedule::constant(double alpha, std::size_t length) {
  return StepSchedule(std::vector<double>(length, alpha));
}

StepSchedule StepSchedule::two_block(std::size_t m, double u) {
  if (m == 0) throw std::invalid_argument("two_block: m must be >= 1");
  if (!(u > 0.0 && u < static_cast<double>(m))) {
    throw std::invalid_argument("two_block: u must satisfy 0 < u < m");
  }
  const double low = u / static_cast<double>(m);
  std::vector<double> alphas(2 * m, low);
  for (std::size_t i = m; i < 2 * m; ++i) alphas[i] = 1.0 - low;
  return StepSchedule(std::move(alphas));
}

StepSchedule StepSchedule::uniform_random(std::size_t length, const RngStream& rng) {
  RngEngine engine(rng);
  std::vector<double> alphas(length);
  for (auto& a : alphas) a = engine.uniform();
  return StepSchedule(std::move(alphas));
}

double StepSchedule::p(std::size_t k) const {
  const double a = alpha(k);
  return 2.0 * a * (1.0 - a);
}

std::vector<double> StepSchedule::move_probabilities(std::size_t n) const {
  if (n > size()) throw std::out_of_range("StepSchedule: n exceeds schedule length");
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) out[i - 1] = p(i);
  return out;
}

double StepSchedule::rho(std::size_t k) const {
  if (k > size()) throw std::out_of_range("StepSchedule: k exceeds schedule length");
  double r = 1.0;
  for (std::size_t j = 0; j < k; ++j) r *= 1.0 - alphas_[j];
  return r;
}

double StepSchedule::sum_s(std::size_t n) const {
  if (n > size()) throw std::out_of_range("StepSchedule: n exceeds schedule length");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += alphas_[i] * (1.0 - alphas_[i]);
  return s;
}

StepSchedule StepSchedule::prefix(std::size_t n) const {
  if (n > size()) throw std::out_of_range("StepSchedule: n exceeds schedule length");
  return StepSchedule(std::vector<double>(alphas_.begin(), alphas_.begin() + static_cast<std::ptrdiff_t>(n)));
}

}  // namespace kmrate
