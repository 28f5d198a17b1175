#include "kmrate/km_core.hpp"

#include <numbers>
#include <numeric>

#include "kmrate/bounds.hpp"
#include "kmrate/stochastic.hpp"

namespace kmrate::km {

SparseSequence::SparseSequence(std::map<std::size_t, double> entries) {
  for (const auto& [i, v] : entries) set(i, v);
}

SparseSequence SparseSequence::unit(std::size_t index, double value) {
  SparseSequence s;
  s.set(index, value);
  return s;
}

double SparseSequence::operator[](std::size_t i) const {
  const auto it = entries_.find(i);
  return it == entries_.end() ? 0.0 : it->second;
}

void SparseSequence::set(std::size_t i, double value) {
  if (value == 0.0) {
    entries_.erase(i);
  } else {
    entries_[i] = value;
  }
}

std::vector<double> SparseSequence::prefix(std::size_t length) const {
  std::vector<double> out(length, 0.0);
  for (const auto& [i, v] : entries_) {
    if (i < length) out[i] = v;
  }
  return out;
}

EuclideanSpace::Point EuclideanSpace::add(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw std::invalid_argument("EuclideanSpace: dimension mismatch");
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

EuclideanSpace::Point EuclideanSpace::scale(double c, const Point& a) const {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

double EuclideanSpace::norm(const Point& a) const {
  return std::sqrt(inner_product(a, a));
}

double EuclideanSpace::inner_product(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw std::invalid_argument("EuclideanSpace: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

EuclideanSpace::Point EuclideanSpace::random_point(RngEngine& engine, double radius) const {
  Point p(dim);
  for (auto& x : p) x = engine.uniform(-radius, radius);
  return p;
}

SparseSequence L1SequenceSpace::add(const SparseSequence& a, const SparseSequence& b) const {
  SparseSequence out = a;
  for (const auto& [i, v] : b.entries()) out.set(i, out[i] + v);
  return out;
}

SparseSequence L1SequenceSpace::scale(double c, const SparseSequence& a) const {
  SparseSequence out;
  for (const auto& [i, v] : a.entries()) out.set(i, c * v);
  return out;
}

double L1SequenceSpace::norm(const SparseSequence& a) const {
  double s = 0.0;
  for (const auto& [i, v] : a.entries()) s += std::abs(v);
  return s;
}

SparseSequence L1SequenceSpace::random_point(RngEngine& engine, double radius) const {
  SparseSequence s;
  const auto count = engine.below(9);
  for (std::uint64_t j = 0; j < count; ++j) s.set(engine.below(16), engine.uniform(-radius, radius));
  return s;
}

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::diameter_bound: return "diameter_bound";
    case CertificateKind::fixpoint_bound_2rootpi: return "fixpoint_bound_2rootpi";
    case CertificateKind::fixpoint_bound_hilbert: return "fixpoint_bound_hilbert";
    case CertificateKind::shifted_hilbert: return "shifted_hilbert";
  }
  return "unknown";
}

namespace {

void enforce(const Certificate& c) {
  if (c.observed > c.value + kCertificateTolerance) {
    throw BoundViolation("certificate " + to_string(c.kind) + " violated: residual " + std::to_string(c.observed) +
                         " exceeds bound " + std::to_string(c.value));
  }
}

}  // namespace

Certificate certify_diameter(std::span<const double> residuals, const StepSchedule& sched, double diam) {
  if (!(diam > 0.0)) throw std::invalid_argument("certify_diameter: diameter must be positive");
  if (residuals.empty()) throw std::invalid_argument("certify_diameter: empty trace");
  Certificate c;
  c.kind = CertificateKind::diameter_bound;
  c.n = residuals.size() - 1;
  c.sum_s = sched.sum_s(c.n);
  c.constant = std::numbers::inv_sqrtpi;
  c.scale = diam;
  c.observed = residuals.back();
  if (c.sum_s > 0.0) {
    c.value = diam / std::sqrt(std::numbers::pi * c.sum_s);
  } else {
    c.value = diam;
    c.trivial = true;
  }
  enforce(c);
  return c;
}

Certificate certify_fixpoint(std::span<const double> residuals, const StepSchedule& sched, double dist0,
                             FixpointVariant variant, bool hilbert) {
  if (!(dist0 >= 0.0)) throw std::invalid_argument("certify_fixpoint: dist0 must be non-negative");
  if (residuals.empty()) throw std::invalid_argument("certify_fixpoint: empty trace");
  if (variant != FixpointVariant::two_over_rootpi && !hilbert) {
    throw std::invalid_argument("certify_fixpoint: Hilbert variants need an inner-product space");
  }
  Certificate c;
  c.n = residuals.size() - 1;
  c.sum_s = sched.sum_s(c.n);
  c.scale = dist0;
  switch (variant) {
    case FixpointVariant::two_over_rootpi:
      c.kind = CertificateKind::fixpoint_bound_2rootpi;
      c.constant = 2.0 * std::numbers::inv_sqrtpi;
      c.observed = residuals.back();
      break;
    case FixpointVariant::hilbert_one:
      c.kind = CertificateKind::fixpoint_bound_hilbert;
      c.constant = 1.0;
      c.observed = residuals.back();
      break;
    case FixpointVariant::hilbert_shifted:
      if (c.n == 0) throw std::invalid_argument("certify_fixpoint: shifted variant needs n >= 1");
      c.kind = CertificateKind::shifted_hilbert;
      c.constant = 1.0;
      c.observed = residuals[c.n - 1];
      break;
  }
  if (c.sum_s > 0.0) {
    c.value = c.constant * dist0 / std::sqrt(c.sum_s);
  } else {
    // ||x - Tx|| <= ||x - y|| + ||Ty - Tx|| <= 2 ||x_0 - y|| for y in Fix(T).
    c.value = 2.0 * dist0;
    c.trivial = true;
  }
  enforce(c);
  return c;
}

namespace {

double euclidean_norm(const DenseVector& x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

// Uniform-ish point of the Euclidean ball: a cube draw rescaled into the ball.
std::function<DenseVector(RngEngine&)> ball_sampler(std::size_t dim, double radius) {
  return [dim, radius](RngEngine& engine) {
    DenseVector x(dim);
    for (auto& v : x) v = engine.uniform(-1.0, 1.0);
    const double r = euclidean_norm(x);
    const double target = radius * engine.uniform();
    if (r > 0.0) {
      for (auto& v : x) v *= target / r;
    }
    return x;
  };
}

void require_in_ball(const DenseVector& x, double radius, const std::string& who) {
  if (euclidean_norm(x) > radius * (1.0 + 1e-12)) throw DomainError(who + ": point outside the ball of radius " + std::to_string(radius));
}

}  // namespace

Operator<EuclideanSpace> identity_operator(std::size_t dim) {
  Operator<EuclideanSpace> op;
  op.name = "identity";
  op.apply = [dim](const DenseVector& x) {
    if (x.size() != dim) throw DomainError("identity: dimension mismatch");
    return x;
  };
  op.sample_domain = ball_sampler(dim, 1.0);
  return op;
}

Operator<EuclideanSpace> negation_operator(std::size_t dim, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("negation_operator: radius must be positive");
  Operator<EuclideanSpace> op;
  op.name = "negation";
  op.apply = [dim, radius](const DenseVector& x) {
    if (x.size() != dim) throw DomainError("negation: dimension mismatch");
    require_in_ball(x, radius, "negation");
    DenseVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -x[i];
    return y;
  };
  op.declared_diameter = 2.0 * radius;
  op.declared_fixed_point = DenseVector(dim, 0.0);
  op.sample_domain = ball_sampler(dim, radius);
  return op;
}

Operator<EuclideanSpace> rotation_operator(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Operator<EuclideanSpace> op;
  op.name = "rotation";
  op.apply = [c, s](const DenseVector& x) {
    if (x.size() != 2) throw DomainError("rotation: expects a point of R^2");
    require_in_ball(x, 1.0, "rotation");
    return DenseVector{c * x[0] - s * x[1], s * x[0] + c * x[1]};
  };
  op.declared_diameter = 2.0;
  op.declared_fixed_point = DenseVector{0.0, 0.0};
  op.sample_domain = ball_sampler(2, 1.0);
  return op;
}

Operator<EuclideanSpace> box_projection_operator(DenseVector lo, DenseVector hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box_projection: bounds must have equal non-zero length");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("box_projection: need lo <= hi");
  }
  Operator<EuclideanSpace> op;
  op.name = "box_projection";
  op.apply = [lo, hi](const DenseVector& x) {
    if (x.size() != lo.size()) throw DomainError("box_projection: dimension mismatch");
    DenseVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], lo[i], hi[i]);
    return y;
  };
  op.sample_domain = [lo, hi](RngEngine& engine) {
    DenseVector x(lo.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = hi[i] - lo[i] + 2.0;
      x[i] = engine.uniform(lo[i] - w, hi[i] + w);
    }
    return x;
  };
  return op;
}

Operator<EuclideanSpace> linear_operator(std::vector<DenseVector> matrix) {
  const std::size_t dim = matrix.size();
  if (dim == 0) throw std::invalid_argument("linear_operator: empty matrix");
  for (const auto& row : matrix) {
    if (row.size() != dim) throw std::invalid_argument("linear_operator: matrix must be square");
  }
  auto multiply = [matrix](const DenseVector& x) {
    DenseVector y(matrix.size(), 0.0);
    for (std::size_t i = 0; i < matrix.size(); ++i) y[i] = std::inner_product(matrix[i].begin(), matrix[i].end(), x.begin(), 0.0);
    return y;
  };
  // Spectral norm by power iteration on A^T A; the Frobenius norm is an upper
  // bound that settles the check immediately when it is <= 1.
  double frobenius = 0.0;
  for (const auto& row : matrix) frobenius += std::inner_product(row.begin(), row.end(), row.begin(), 0.0);
  if (std::sqrt(frobenius) > 1.0 + 1e-12) {
    DenseVector v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    v[0] += 0.1;  // avoid starting orthogonal to the top singular vector of symmetric examples
    double sigma = 0.0;
    for (int it = 0; it < 5000; ++it) {
      auto av = multiply(v);
      DenseVector atav(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) atav[j] += matrix[i][j] * av[i];
      }
      const double len = euclidean_norm(atav);
      if (len == 0.0) break;
      sigma = std::sqrt(len / euclidean_norm(v));
      for (std::size_t j = 0; j < dim; ++j) v[j] = atav[j] / len;
    }
    if (sigma > 1.0 + 1e-9) throw std::invalid_argument("linear_operator: spectral norm exceeds 1");
  }
  Operator<EuclideanSpace> op;
  op.name = "linear";
  op.apply = [multiply, dim](const DenseVector& x) {
    if (x.size() != dim) throw DomainError("linear: dimension mismatch");
    require_in_ball(x, 1.0, "linear");
    return multiply(x);
  };
  op.declared_diameter = 2.0;
  op.declared_fixed_point = DenseVector(dim, 0.0);
  op.sample_domain = ball_sampler(dim, 1.0);
  return op;
}

Operator<L1SequenceSpace> shift_operator_l1() {
  Operator<L1SequenceSpace> op;
  op.name = "shift_l1";
  op.declared_fixed_point = SparseSequence{};
  op.apply = [](const SparseSequence& x) {
    double total = 0.0;
    SparseSequence y;
    for (const auto& [i, v] : x.entries()) {
      if (v < 0.0) throw DomainError("shift_l1: negative coordinate");
      total += v;
      y.set(i + 1, v);
    }
    if (total > 1.0 + 1e-12) throw DomainError("shift_l1: coordinates sum above 1");
    return y;
  };
  op.declared_diameter = 2.0;
  op.sample_domain = [](RngEngine& engine) {
    SparseSequence x;
    const auto count = 1 + engine.below(8);
    std::vector<std::pair<std::size_t, double>> raw;
    double total = 0.0;
    for (std::uint64_t j = 0; j < count; ++j) {
      const double w = engine.uniform();
      raw.emplace_back(engine.below(16), w);
      total += w;
    }
    const double mass = engine.uniform();
    for (const auto& [i, w] : raw) x.set(i, x[i] + mass * w / total);
    return x;
  };
  return op;
}

double sharpness_optimal_u() {
  return 0.5 * bounds::constants().eta_argmax;
}

SharpnessResult shift_sharpness_experiment(std::size_t m, double u) {
  if (m == 0) throw std::invalid_argument("shift_sharpness_experiment: m must be >= 1");
  if (!(u > 0.0 && u < static_cast<double>(m))) throw std::invalid_argument("shift_sharpness_experiment: need 0 < u < m");
  const auto sched = StepSchedule::two_block(m, u);
  const auto dist = stochastic::poisson_binomial_pmf(stochastic::BernoulliVector(std::vector<double>(sched.alphas().begin(), sched.alphas().end())));
  SharpnessResult r;
  r.m = m;
  r.u = u;
  r.central_mass = dist.mass(static_cast<std::int64_t>(m));
  r.observed = r.central_mass * std::sqrt(sched.sum_s(sched.size()));
  r.eta = bounds::constants().eta;
  r.gap = r.eta - r.observed;
  return r;
}

}  // namespace kmrate::km
