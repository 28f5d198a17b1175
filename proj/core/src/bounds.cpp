#include "kmrate/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kmrate/detail/golden.hpp"
#include "kmrate/special_fn.hpp"

namespace kmrate::bounds {

using stochastic::BernoulliVector;

std::vector<double> weights(const StepSchedule& sched, std::size_t n) {
  if (n > sched.size()) throw std::out_of_range("weights: n exceeds schedule length");
  std::vector<double> pi(n + 1);
  double tail = 1.0;  // prod_{j=k+1}^n (1 - alpha_j)
  for (std::size_t k = n + 1; k-- > 0;) {
    pi[k] = sched.alpha(k) * tail;
    tail *= sched.alpha_bar(k);
  }
  return pi;
}

BoundTable::BoundTable(std::size_t n_max) : n_max_(n_max), entries_((n_max + 1) * (n_max + 4) / 2, 0.0) {}

std::size_t BoundTable::index(std::int64_t m, std::size_t n) const {
  if (n > n_max_ || m < -1 || m > static_cast<std::int64_t>(n)) {
    throw std::out_of_range("BoundTable: (m, n) outside -1 <= m <= n <= n_max");
  }
  // Row n holds m = -1..n and starts after sum_{j<n} (j + 2) entries.
  return n * (n + 3) / 2 + static_cast<std::size_t>(m + 1);
}

namespace {

// pi_k^n for 0 <= k <= n <= n_max, stored row-major by n.
std::vector<std::vector<double>> weight_triangle(const StepSchedule& sched, std::size_t n_max) {
  std::vector<std::vector<double>> pi(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    pi[n].resize(n + 1);
    for (std::size_t k = 0; k < n; ++k) pi[n][k] = pi[n - 1][k] * sched.alpha_bar(n);
    pi[n][n] = sched.alpha(n);
  }
  return pi;
}

void fill_boundary(BoundTable& table) {
  for (std::size_t n = 0; n <= table.n_max(); ++n) {
    table.at(-1, n) = 1.0;
    table.at(static_cast<std::int64_t>(n), n) = 0.0;
  }
}

BoundTable reference_table(const StepSchedule& sched, std::size_t n_max) {
  const auto pi = weight_triangle(sched, n_max);
  BoundTable table(n_max);
  fill_boundary(table);
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      double total = 0.0;
      for (std::size_t j = 0; j <= m; ++j) {
        double inner = 0.0;
        for (std::size_t k = m + 1; k <= n; ++k) {
          inner += pi[n][k] * table(static_cast<std::int64_t>(j) - 1, k - 1);
        }
        total += pi[m][j] * inner;
      }
      table.at(static_cast<std::int64_t>(m), n) = total;
    }
  }
  return table;
}

double recurrence_rhs(const BoundTable& t, const StepSchedule& sched, std::size_t m, std::size_t n) {
  const auto mi = static_cast<std::int64_t>(m);
  const double am = sched.alpha(m);
  const double an = sched.alpha(n);
  return (1.0 - am) * t(mi - 1, n) + (1.0 - an) * t(mi, n - 1) + (an * am - (1.0 - an) * (1.0 - am)) * t(mi - 1, n - 1);
}

BoundTable fast_table(const StepSchedule& sched, std::size_t n_max) {
  BoundTable table(n_max);
  fill_boundary(table);
  // With alpha_0 = 1 the recurrence also covers the m = 0 row.
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      table.at(static_cast<std::int64_t>(m), n) = recurrence_rhs(table, sched, m, n);
    }
  }
  return table;
}

}  // namespace

BoundTable c_table(const StepSchedule& sched, std::size_t n_max, CTableMethod method) {
  if (n_max > sched.size()) throw std::out_of_range("c_table: n_max exceeds schedule length");
  return method == CTableMethod::reference ? reference_table(sched, n_max) : fast_table(sched, n_max);
}

double recurrence_check(const BoundTable& table, const StepSchedule& sched) {
  if (table.n_max() > sched.size()) throw std::out_of_range("recurrence_check: table larger than schedule");
  double worst = 0.0;
  for (std::size_t n = 2; n <= table.n_max(); ++n) {
    for (std::size_t m = 1; m < n; ++m) {
      const double residual = std::abs(table(static_cast<std::int64_t>(m), n) - recurrence_rhs(table, sched, m, n));
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

double pn_recursion(const StepSchedule& sched, std::size_t n, CTableMethod method) {
  if (n + 1 > sched.size()) throw std::out_of_range("pn_recursion: need n + 1 <= schedule length");
  const double step = sched.alpha(n + 1);
  if (step == 0.0) throw ZeroStepError("pn_recursion: alpha_{n+1} = 0, use pn_exact");
  const auto table = c_table(sched, n + 1, method);
  return table(static_cast<std::int64_t>(n), n + 1) / step;
}

double ballot_expectation(const BernoulliVector& p) {
  const auto dist = stochastic::poisson_binomial_pmf(p);
  const auto pmf = dist.pmf();
  double f = 1.0;  // F(k), advanced by the ratio recurrence
  double sum = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (k % 2 == 1) f *= static_cast<double>(k) / static_cast<double>(k + 1);
    sum += pmf[k] * f;
  }
  return sum;
}

double pn_exact(const StepSchedule& sched, std::size_t n) {
  return ballot_expectation(BernoulliVector(sched.move_probabilities(n)));
}

RateReport rate_report_from(const StepSchedule& sched, std::size_t n, double pn) {
  RateReport r;
  r.n = n;
  r.sum_s = sched.sum_s(n);
  r.pn = pn;
  r.product = std::sqrt(r.sum_s) * pn;
  r.bound_ok = r.product <= std::numbers::inv_sqrtpi + kBoundTolerance;
  return r;
}

RateReport rate_report(const StepSchedule& sched, std::size_t n) {
  return rate_report_from(sched, n, pn_exact(sched, n));
}

double rn_value(const BernoulliVector& p) {
  for (double q : p) {
    if (q > 0.5) throw std::invalid_argument("rn_value: every p_i must lie in [0, 1/2]");
  }
  return std::sqrt(p.total()) * ballot_expectation(p);
}

namespace {

struct AscentResult {
  std::vector<double> point;
  double value;
};

// Along coordinate i, with S the sum of the other Bernoullis and m their total
// probability, R(x) = sqrt(m + x) [(1 - x) E F(S) + x E F(S + 1)].
AscentResult coordinate_ascent(std::vector<double> p) {
  double value = rn_value(BernoulliVector(p));
  for (int sweep = 0; sweep < 10000; ++sweep) {
    const double before = value;
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::vector<double> others = p;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(i));
      const double mass = std::accumulate(others.begin(), others.end(), 0.0);
      const auto pmf_dist = stochastic::poisson_binomial_pmf(BernoulliVector(std::move(others)));
      const auto pmf = pmf_dist.pmf();
      double stay = 0.0;
      double step = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        stay += pmf[k] * special_fn::ballot_F_value(k);
        step += pmf[k] * special_fn::ballot_F_value(k + 1);
      }
      auto along = [&](double x) { return std::sqrt(mass + x) * ((1.0 - x) * stay + x * step); };
      const auto best = detail::golden_section_max(along, 0.0, 0.5, 1e-12);
      p[i] = best.x;
      value = rn_value(BernoulliVector(p));
    }
    if (value - before <= 1e-15) break;
  }
  return AscentResult{std::move(p), value};
}

}  // namespace

Maximizer rn_maximize(std::size_t n, std::size_t grid_steps) {
  if (n == 0) return Maximizer{BernoulliVector{}, 0.0};
  if (n > 6) throw std::invalid_argument("rn_maximize: n must be <= 6");
  if (grid_steps < 50) throw std::invalid_argument("rn_maximize: grid_steps must be >= 50");

  std::vector<std::vector<double>> starts;
  for (std::size_t g = 0; g <= grid_steps; ++g) {
    starts.emplace_back(n, 0.5 * static_cast<double>(g) / static_cast<double>(grid_steps));
  }
  // Mixed starts over {0.1, 0.25, 0.4}^n break the symmetry of the diagonal.
  const double levels[] = {0.1, 0.25, 0.4};
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<double> start(n);
    std::size_t code = c;
    for (std::size_t i = 0; i < n; ++i, code /= 3) start[i] = levels[code % 3];
    starts.push_back(std::move(start));
  }

  AscentResult best{std::vector<double>(n, 0.0), -1.0};
  for (auto& s : starts) {
    auto result = coordinate_ascent(std::move(s));
    if (result.value > best.value) best = std::move(result);
  }
  return Maximizer{BernoulliVector(std::move(best.point)), best.value};
}

MaximizerStructure maximizer_structure(const BernoulliVector& p, double tol) {
  MaximizerStructure s;
  for (double q : p) {
    if (q <= tol) {
      ++s.zeros;
    } else if (q >= 0.5 - tol) {
      ++s.halves;
    } else {
      s.interior.push_back(q);
    }
  }
  s.ok = true;
  if (!s.interior.empty()) {
    const auto [lo, hi] = std::minmax_element(s.interior.begin(), s.interior.end());
    s.ok = *hi - *lo <= tol;
  }
  return s;
}

std::vector<double> equal_prob_curve(double u, std::size_t n_max) {
  if (!(u > 0.0 && u <= 0.5)) throw std::domain_error("equal_prob_curve: u must lie in (0, 1/2]");
  auto values = special_fn::hyp2f1_terminating_sequence(static_cast<std::uint32_t>(n_max), u);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= std::sqrt(static_cast<double>(i + 1) * u);
  }
  return values;
}

double h_envelope(double z) {
  if (!(z > 0.0)) throw std::domain_error("h_envelope: z must be positive");
  const auto b = special_fn::bessel_pair_scaled(z);
  return std::sqrt(z + 0.5) * (b.i0 + b.i1 - b.i1 / (2.0 * z));
}

double eta_objective(double x) {
  return std::sqrt(x) * special_fn::bessel_I_scaled(0, x);
}

namespace {

Constants compute_constants() {
  constexpr double lo = 0.1;
  constexpr double hi = 10.0;
  // The objective must rise then fall on the bracket: the sign of a forward
  // difference may change at most once, from + to -.
  constexpr int grid = 2000;
  int sign_changes = 0;
  bool rising = true;
  double prev = eta_objective(lo);
  for (int i = 1; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double cur = eta_objective(x);
    const bool up = cur > prev;
    if (up != rising) {
      ++sign_changes;
      if (up) throw std::logic_error("constants: eta objective not unimodal on [0.1, 10]");
      rising = up;
    }
    prev = cur;
  }
  if (sign_changes != 1) throw std::logic_error("constants: eta objective not unimodal on [0.1, 10]");

  const auto best = detail::golden_section_max(eta_objective, lo, hi, 1e-10);
  Constants c;
  c.kappa = std::numbers::inv_sqrtpi;
  c.sqrt_2_over_pi = std::sqrt(2.0 / std::numbers::pi);
  c.eta = best.value;
  c.eta_argmax = best.x;
  return c;
}

}  // namespace

const Constants& constants() {
  static const Constants c = compute_constants();
  return c;
}

}  // namespace kmrate::bounds
