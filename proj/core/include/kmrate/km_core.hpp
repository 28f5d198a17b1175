#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmrate/rng.hpp"
#include "kmrate/schedule.hpp"

namespace kmrate::km {

using DenseVector = std::vector<double>;

/// Finitely supported real sequence indexed by the natural numbers.
/// Zero entries are never stored.
class SparseSequence {
 public:
  SparseSequence() = default;
  explicit SparseSequence(std::map<std::size_t, double> entries);
  static SparseSequence unit(std::size_t index, double value = 1.0);

  double operator[](std::size_t i) const;
  void set(std::size_t i, double value);
  const std::map<std::size_t, double>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  /// Dense copy of coordinates 0..length-1.
  std::vector<double> prefix(std::size_t length) const;

  friend bool operator==(const SparseSequence&, const SparseSequence&) = default;

 private:
  std::map<std::size_t, double> entries_;
};

/// R^d with the Euclidean norm.
struct EuclideanSpace {
  using Point = DenseVector;
  static constexpr bool kHilbert = true;

  std::size_t dim = 2;

  Point add(const Point& a, const Point& b) const;
  Point scale(double c, const Point& a) const;
  double norm(const Point& a) const;
  double inner_product(const Point& a, const Point& b) const;
  /// Uniform in the cube [-radius, radius]^dim.
  Point random_point(RngEngine& engine, double radius = 1.0) const;
};

/// Finitely supported sequences in l^1(N).
struct L1SequenceSpace {
  using Point = SparseSequence;
  static constexpr bool kHilbert = false;

  SparseSequence add(const SparseSequence& a, const SparseSequence& b) const;
  SparseSequence scale(double c, const SparseSequence& a) const;
  double norm(const SparseSequence& a) const;
  /// Random sequence with at most 8 non-zeros on indices below 16.
  SparseSequence random_point(RngEngine& engine, double radius = 1.0) const;
};

template <typename S>
concept NormedSpace = requires(const S s, const typename S::Point& x, double c, RngEngine& engine) {
  { s.add(x, x) } -> std::convertible_to<typename S::Point>;
  { s.scale(c, x) } -> std::convertible_to<typename S::Point>;
  { s.norm(x) } -> std::convertible_to<double>;
  { s.random_point(engine, c) } -> std::convertible_to<typename S::Point>;
  { S::kHilbert } -> std::convertible_to<bool>;
};

template <typename S>
concept HilbertSpace = NormedSpace<S> && S::kHilbert && requires(const S s, const typename S::Point& x) {
  { s.inner_product(x, x) } -> std::convertible_to<double>;
};

template <NormedSpace S>
double distance(const S& space, const typename S::Point& a, const typename S::Point& b) {
  return space.norm(space.add(a, space.scale(-1.0, b)));
}

/// A non-expansive self-map of a convex set C, as declared by its author.
template <NormedSpace S>
struct Operator {
  using Point = typename S::Point;

  std::string name;
  std::function<Point(const Point&)> apply;
  std::optional<double> declared_diameter;          // diam C
  std::optional<Point> declared_fixed_point;
  std::function<Point(RngEngine&)> sample_domain;   // draws points of C, for spot checks
};

/// Raised when an operator is applied outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <NormedSpace S>
struct IterationTrace {
  using Point = typename S::Point;

  std::vector<Point> points;      // x_0..x_n
  std::vector<Point> images;      // T x_0..T x_n
  std::vector<double> residuals;  // ||x_k - T x_k||
  StepSchedule schedule;
  bool hilbert = S::kHilbert;

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

/// x_k = (1 - alpha_k) x_{k-1} + alpha_k T x_{k-1}, k = 1..n.
template <NormedSpace S>
IterationTrace<S> km_iterate(const S& space, const Operator<S>& op, const typename S::Point& x0,
                             const StepSchedule& sched, std::size_t n) {
  if (n > sched.size()) throw std::out_of_range("km_iterate: n exceeds schedule length");
  IterationTrace<S> trace;
  trace.schedule = sched.prefix(n);
  trace.points.reserve(n + 1);
  trace.images.reserve(n + 1);
  trace.residuals.reserve(n + 1);
  auto record = [&](typename S::Point x) {
    auto tx = op.apply(x);
    trace.residuals.push_back(distance(space, x, tx));
    trace.points.push_back(std::move(x));
    trace.images.push_back(std::move(tx));
  };
  record(x0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double a = sched.alpha(k);
    record(space.add(space.scale(1.0 - a, trace.points.back()), space.scale(a, trace.images.back())));
  }
  return trace;
}

enum class CertificateKind {
  diameter_bound,
  fixpoint_bound_2rootpi,
  fixpoint_bound_hilbert,
  shifted_hilbert,
};

std::string to_string(CertificateKind kind);

struct Certificate {
  CertificateKind kind = CertificateKind::diameter_bound;
  double value = 0.0;     // certified upper bound on the residual
  double observed = 0.0;  // residual being certified (r_n, or r_{n-1} when shifted)
  std::size_t n = 0;
  double sum_s = 0.0;
  double constant = 0.0;  // 1/sqrt(pi), 2/sqrt(pi) or 1
  double scale = 0.0;     // diameter or distance to Fix(T)
  bool trivial = false;   // sum_s = 0: the step-independent bound was used
};

/// Raised when an observed residual exceeds its certificate.
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class FixpointVariant { two_over_rootpi, hilbert_one, hilbert_shifted };

/// Slack allowed between a certificate and the residual it bounds.
inline constexpr double kCertificateTolerance = 1e-10;

/// Certifies r_n <= diam / sqrt(pi Sum alpha_i (1 - alpha_i)). Falls back to
/// r_n <= diam when the sum vanishes. Throws BoundViolation otherwise.
Certificate certify_diameter(std::span<const double> residuals, const StepSchedule& sched, double diam);

/// Certifies r_n <= kappa dist0 / sqrt(Sum alpha_i (1 - alpha_i)) with
/// kappa = 2/sqrt(pi) or 1 (Hilbert); the shifted variant certifies r_{n-1}.
/// Falls back to 2 dist0 when the sum vanishes.
Certificate certify_fixpoint(std::span<const double> residuals, const StepSchedule& sched, double dist0,
                             FixpointVariant variant, bool hilbert);

template <NormedSpace S>
Certificate certify_diameter(const IterationTrace<S>& trace, double diam) {
  return certify_diameter(trace.residuals, trace.schedule, diam);
}

template <NormedSpace S>
Certificate certify_fixpoint(const IterationTrace<S>& trace, double dist0, FixpointVariant variant) {
  return certify_fixpoint(trace.residuals, trace.schedule, dist0, variant, trace.hilbert);
}

/// Largest residual of
/// ||(1-a)u + a v||^2 = (1-a)||u||^2 + a||v||^2 - a(1-a)||u-v||^2
/// over `samples` random triples. Rejects spaces without an inner product.
template <NormedSpace S>
double hilbert_identity_check(const S& space, std::size_t samples, const RngStream& rng) {
  if constexpr (!S::kHilbert) {
    throw std::invalid_argument("hilbert_identity_check: space has no inner product");
  } else {
    RngEngine engine(rng);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const auto u = space.random_point(engine, 1.0);
      const auto v = space.random_point(engine, 1.0);
      const double a = engine.uniform();
      const double lhs = std::pow(space.norm(space.add(space.scale(1.0 - a, u), space.scale(a, v))), 2);
      const double nu = space.norm(u);
      const double nv = space.norm(v);
      const double duv = distance(space, u, v);
      const double rhs = (1.0 - a) * nu * nu + a * nv * nv - a * (1.0 - a) * duv * duv;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
  }
}

struct NormAxiomReport {
  double triangle_excess = 0.0;     // max of ||x+y|| - ||x|| - ||y||
  double homogeneity_error = 0.0;   // max of | ||c x|| - |c| ||x|| |
  double inner_product_error = 0.0; // max of | ||x||^2 - <x,x> | (Hilbert only)
  bool ok(double tol = 1e-10) const {
    return triangle_excess <= tol && homogeneity_error <= tol && inner_product_error <= tol;
  }
};

template <NormedSpace S>
NormAxiomReport check_norm_axioms(const S& space, std::size_t samples, const RngStream& rng) {
  RngEngine engine(rng);
  NormAxiomReport report;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = space.random_point(engine, 1.0);
    const auto y = space.random_point(engine, 1.0);
    const double c = engine.uniform(-3.0, 3.0);
    report.triangle_excess = std::max(report.triangle_excess, space.norm(space.add(x, y)) - space.norm(x) - space.norm(y));
    report.homogeneity_error =
        std::max(report.homogeneity_error, std::abs(space.norm(space.scale(c, x)) - std::abs(c) * space.norm(x)));
    if constexpr (S::kHilbert) {
      const double nx = space.norm(x);
      report.inner_product_error = std::max(report.inner_product_error, std::abs(nx * nx - space.inner_product(x, x)));
    }
  }
  return report;
}

/// Largest ratio ||Tx - Ty|| / ||x - y|| over sampled domain pairs.
/// Non-expansive operators stay at or below 1 + 1e-10.
template <NormedSpace S>
double nonexpansive_spot_check(const S& space, const Operator<S>& op, std::size_t pairs, const RngStream& rng) {
  if (!op.sample_domain) throw std::invalid_argument("nonexpansive_spot_check: operator has no domain sampler");
  RngEngine engine(rng);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto x = op.sample_domain(engine);
    const auto y = op.sample_domain(engine);
    const double d = distance(space, x, y);
    if (d == 0.0) continue;
    worst = std::max(worst, distance(space, op.apply(x), op.apply(y)) / d);
  }
  return worst;
}

// Built-in operators on R^d.
Operator<EuclideanSpace> identity_operator(std::size_t dim);
/// x -> -x on the Euclidean ball of the given radius.
Operator<EuclideanSpace> negation_operator(std::size_t dim, double radius);
/// Planar rotation by `angle` on the unit disk.
Operator<EuclideanSpace> rotation_operator(double angle);
/// Coordinate-wise clamp onto [lo, hi]; acts on all of R^d, Fix(T) is the box.
Operator<EuclideanSpace> box_projection_operator(DenseVector lo, DenseVector hi);
/// x -> A x on the unit ball; requires spectral norm ||A||_2 <= 1.
Operator<EuclideanSpace> linear_operator(std::vector<DenseVector> matrix);

/// Right shift (x^0, x^1, ...) -> (0, x^0, x^1, ...) on
/// C = {x : x^i >= 0, Sum x^i <= 1} in l^1. diam C = 2.
Operator<L1SequenceSpace> shift_operator_l1();

struct SharpnessResult {
  std::size_t m = 0;
  double u = 0.0;
  double central_mass = 0.0;  // p_{2m}^m = P(X = Y)
  double observed = 0.0;      // central_mass * sqrt(Sum alpha_i (1 - alpha_i))
  double eta = 0.0;
  double gap = 0.0;           // eta - observed
};

/// Two-block schedule of 2m steps (alpha = u/m, then 1 - u/m) driving the l^1 shift.
SharpnessResult shift_sharpness_experiment(std::size_t m, double u);

/// The u maximizing the limiting observed value: half the argmax of sqrt(x) e^{-x} I0(x).
double sharpness_optimal_u();

}  // namespace kmrate::km
