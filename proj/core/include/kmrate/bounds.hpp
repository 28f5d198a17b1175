#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kmrate/schedule.hpp"
#include "kmrate/stochastic.hpp"

namespace kmrate::bounds {

/// Absolute tolerance used by every bound check on O(1) quantities.
inline constexpr double kBoundTolerance = 1e-10;

/// (pi_0^n, ..., pi_n^n) with pi_k^n = alpha_k prod_{j=k+1}^n (1 - alpha_j).
std::vector<double> weights(const StepSchedule& sched, std::size_t n);

/// Triangle of c_{mn} for -1 <= m <= n <= n_max.
class BoundTable {
 public:
  BoundTable() = default;
  explicit BoundTable(std::size_t n_max);

  std::size_t n_max() const { return n_max_; }
  double operator()(std::int64_t m, std::size_t n) const { return entries_[index(m, n)]; }
  double& at(std::int64_t m, std::size_t n) { return entries_[index(m, n)]; }

 private:
  std::size_t index(std::int64_t m, std::size_t n) const;

  std::size_t n_max_ = 0;
  std::vector<double> entries_;
};

enum class CTableMethod {
  reference,  // the double-sum definition, O(n^4)
  fast,       // the three-term recurrence, O(n^2)
};

BoundTable c_table(const StepSchedule& sched, std::size_t n_max, CTableMethod method = CTableMethod::reference);

/// Largest violation of
/// c_{mn} = abar_m c_{m-1,n} + abar_n c_{m,n-1} + (a_n a_m - abar_n abar_m) c_{m-1,n-1}
/// over 1 <= m < n <= n_max.
double recurrence_check(const BoundTable& table, const StepSchedule& sched);

/// Raised when P^n is requested through c_{n,n+1} / alpha_{n+1} with alpha_{n+1} = 0.
class ZeroStepError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// P^n = c_{n,n+1} / alpha_{n+1}.
double pn_recursion(const StepSchedule& sched, std::size_t n, CTableMethod method = CTableMethod::reference);

/// P^n = E[F(M)], M Poisson-binomial with p_i = 2 alpha_i (1 - alpha_i).
double pn_exact(const StepSchedule& sched, std::size_t n);

/// E[F(M)] for arbitrary move probabilities.
double ballot_expectation(const stochastic::BernoulliVector& p);

struct RateReport {
  std::size_t n = 0;
  double sum_s = 0.0;
  double pn = 1.0;
  double product = 0.0;
  bool bound_ok = true;
};

RateReport rate_report(const StepSchedule& sched, std::size_t n);
/// Same assembly with a caller-supplied P^n (e.g. a Monte Carlo estimate).
RateReport rate_report_from(const StepSchedule& sched, std::size_t n, double pn);

/// sqrt(p_1 + ... + p_n) E[F(M_1 + ... + M_n)]; requires every p_i in [0, 1/2].
double rn_value(const stochastic::BernoulliVector& p);

struct Maximizer {
  stochastic::BernoulliVector argmax;
  double value = 0.0;
};

/// Multi-start coordinate ascent for max rn_value over [0, 1/2]^n.
Maximizer rn_maximize(std::size_t n, std::size_t grid_steps);

struct MaximizerStructure {
  bool ok = false;
  std::size_t zeros = 0;
  std::size_t halves = 0;
  std::vector<double> interior;  // coordinates strictly inside (0, 1/2) after snapping
};

/// Snaps coordinates within `tol` of 0 or 1/2 and checks that the remaining
/// interior coordinates agree to within `tol`.
MaximizerStructure maximizer_structure(const stochastic::BernoulliVector& p, double tol);

/// sqrt(n u) E[F(S)], S ~ Binomial(n, u), for n = 1..n_max.
std::vector<double> equal_prob_curve(double u, std::size_t n_max);

/// sqrt(z + 1/2) e^{-z} [I0(z) + (1 - 1/(2z)) I1(z)].
double h_envelope(double z);

struct Constants {
  double kappa = 0.0;           // 1/sqrt(pi)
  double sqrt_2_over_pi = 0.0;
  double eta = 0.0;             // max_{x>=0} sqrt(x) e^{-x} I0(x)
  double eta_argmax = 0.0;      // the maximizing x
};

/// Computed once; eta by golden-section search on [0.1, 10].
const Constants& constants();

/// sqrt(x) e^{-x} I0(x).
double eta_objective(double x);

}  // namespace kmrate::bounds
