#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "kmrate/bounds.hpp"
#include "kmrate/km_core.hpp"
#include "kmrate/stochastic.hpp"
#include "oracles.hpp"

using namespace kmrate;
using namespace kmrate::km;

namespace {

const double kQuarterTurn = std::numbers::pi / 2.0;

template <typename S>
void expect_residuals_non_increasing(const IterationTrace<S>& trace) {
  for (std::size_t k = 1; k < trace.residuals.size(); ++k) {
    EXPECT_LE(trace.residuals[k], trace.residuals[k - 1] + 1e-12) << k;
  }
}

std::vector<Operator<EuclideanSpace>> dense_operators() {
  return {negation_operator(3, 1.0), rotation_operator(kQuarterTurn), rotation_operator(2.5),
          linear_operator({{0.6, -0.8}, {0.8, 0.6}}), linear_operator({{0.5, 0.0}, {0.0, -1.0}})};
}

}  // namespace

TEST(Spaces, SatisfyConcepts) {
  static_assert(HilbertSpace<EuclideanSpace>);
  static_assert(NormedSpace<L1SequenceSpace>);
  static_assert(!HilbertSpace<L1SequenceSpace>);
}

TEST(Spaces, NormAxioms) {
  EXPECT_TRUE(check_norm_axioms(EuclideanSpace{5}, 2000, RngStream{1, 0}).ok());
  EXPECT_TRUE(check_norm_axioms(L1SequenceSpace{}, 2000, RngStream{1, 1}).ok());
}

TEST(Spaces, SparseSequenceDropsZeros) {
  SparseSequence x;
  x.set(3, 0.5);
  x.set(3, 0.0);
  EXPECT_EQ(x.support_size(), 0U);
  const L1SequenceSpace l1;
  const auto d = l1.add(SparseSequence::unit(0), l1.scale(-1.0, SparseSequence::unit(0)));
  EXPECT_EQ(d.support_size(), 0U);
  EXPECT_EQ(l1.norm(SparseSequence({{0, 0.25}, {5, -0.5}})), 0.75);
}

TEST(Iterate, IdentityIsStationary) {
  const EuclideanSpace space{3};
  const auto trace = km_iterate(space, identity_operator(3), DenseVector{1.0, -2.0, 0.5}, StepSchedule::constant(0.7, 10), 10);
  ASSERT_EQ(trace.steps(), 10U);
  for (std::size_t k = 0; k <= 10; ++k) {
    EXPECT_EQ(trace.points[k], (DenseVector{1.0, -2.0, 0.5}));
    EXPECT_EQ(trace.residuals[k], 0.0);
  }
}

TEST(Iterate, NegationHalfStepLandsOnFixedPoint) {
  const EuclideanSpace space{1};
  const auto trace = km_iterate(space, negation_operator(1, 1.0), DenseVector{1.0}, StepSchedule::constant(0.5, 5), 5);
  EXPECT_EQ(trace.points[1][0], 0.0);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(trace.residuals[k], 0.0);
}

TEST(Iterate, RotationShrinksGeometrically) {
  const EuclideanSpace space{2};
  const auto trace = km_iterate(space, rotation_operator(kQuarterTurn), DenseVector{1.0, 0.0}, StepSchedule::constant(0.5, 16), 16);
  for (std::size_t k = 0; k <= 16; ++k) {
    const double expected = std::pow(std::sqrt(0.5), static_cast<double>(k));
    EXPECT_NEAR(space.norm(trace.points[k]), expected, 1e-14);
    EXPECT_NEAR(trace.residuals[k], std::sqrt(2.0) * expected, 1e-14);
  }
}

TEST(Iterate, ReconstructsRecurrence) {
  const EuclideanSpace space{2};
  RngEngine engine(RngStream{2, 0});
  const StepSchedule sched(oracle::random_alphas(engine, 50));
  const auto trace = km_iterate(space, rotation_operator(1.0), DenseVector{0.6, 0.3}, sched, 50);
  for (std::size_t k = 1; k <= 50; ++k) {
    const double a = sched.alpha(k);
    const auto rebuilt = space.add(space.scale(1.0 - a, trace.points[k - 1]), space.scale(a, trace.images[k - 1]));
    EXPECT_LE(distance(space, rebuilt, trace.points[k]), 1e-10);
  }
}

TEST(Iterate, PropagatesDomainErrors) {
  const EuclideanSpace space{2};
  EXPECT_THROW(km_iterate(space, rotation_operator(1.0), DenseVector{3.0, 0.0}, StepSchedule::constant(0.5, 2), 2),
               DomainError);
  EXPECT_THROW(km_iterate(space, rotation_operator(1.0), DenseVector{0.5, 0.0}, StepSchedule::constant(0.5, 2), 3),
               std::out_of_range);
}

TEST(Operators, NonExpansiveSpotCheck) {
  const EuclideanSpace space2{2};
  const EuclideanSpace space3{3};
  EXPECT_LE(nonexpansive_spot_check(space3, negation_operator(3, 1.0), 2000, RngStream{3, 0}), 1.0 + 1e-10);
  EXPECT_LE(nonexpansive_spot_check(space2, rotation_operator(0.7), 2000, RngStream{3, 1}), 1.0 + 1e-10);
  EXPECT_LE(nonexpansive_spot_check(space2, box_projection_operator({0.0, 0.0}, {1.0, 0.5}), 2000, RngStream{3, 2}),
            1.0 + 1e-10);
  EXPECT_LE(nonexpansive_spot_check(space2, linear_operator({{0.6, -0.8}, {0.8, 0.6}}), 2000, RngStream{3, 3}),
            1.0 + 1e-10);
  EXPECT_LE(nonexpansive_spot_check(L1SequenceSpace{}, shift_operator_l1(), 2000, RngStream{3, 4}), 1.0 + 1e-10);
  EXPECT_THROW(linear_operator({{2.0, 0.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(Certificates, RotationExample) {
  const EuclideanSpace space{2};
  const auto trace = km_iterate(space, rotation_operator(kQuarterTurn), DenseVector{1.0, 0.0}, StepSchedule::constant(0.5, 16), 16);
  const auto diam = certify_diameter(trace, 2.0);
  EXPECT_NEAR(diam.value, 2.0 / std::sqrt(4.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(diam.observed, std::pow(std::sqrt(0.5), 16) * std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(diam.trivial);

  const auto one = certify_fixpoint(trace, 1.0, FixpointVariant::hilbert_one);
  EXPECT_NEAR(one.value, 0.5, 1e-15);
  const auto two = certify_fixpoint(trace, 1.0, FixpointVariant::two_over_rootpi);
  EXPECT_NEAR(two.value / one.value, 2.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(two.value / one.value, 1.1284, 1e-4);
  const auto shifted = certify_fixpoint(trace, 1.0, FixpointVariant::hilbert_shifted);
  EXPECT_EQ(shifted.kind, CertificateKind::shifted_hilbert);
  EXPECT_EQ(shifted.observed, trace.residuals[15]);
}

TEST(Certificates, ViolationAndTrivialCases) {
  const StepSchedule sched = StepSchedule::constant(0.5, 4);
  const std::vector<double> residuals{1.0, 1.0, 1.0, 1.0, 1.0};
  EXPECT_THROW(certify_diameter(residuals, sched, 1.0), BoundViolation);

  const StepSchedule frozen = StepSchedule::constant(0.0, 4);
  const std::vector<double> flat{0.9, 0.9, 0.9, 0.9, 0.9};
  const auto d = certify_diameter(flat, frozen, 1.0);
  EXPECT_TRUE(d.trivial);
  EXPECT_EQ(d.value, 1.0);
  const auto f = certify_fixpoint(flat, frozen, 0.5, FixpointVariant::two_over_rootpi, false);
  EXPECT_TRUE(f.trivial);
  EXPECT_EQ(f.value, 1.0);
}

TEST(Certificates, HilbertVariantsNeedInnerProduct) {
  const L1SequenceSpace l1;
  const auto trace = km_iterate(l1, shift_operator_l1(), SparseSequence::unit(0), StepSchedule::constant(0.5, 4), 4);
  EXPECT_FALSE(trace.hilbert);
  EXPECT_THROW(certify_fixpoint(trace, 1.0, FixpointVariant::hilbert_one), std::invalid_argument);
  EXPECT_THROW(certify_fixpoint(trace, 1.0, FixpointVariant::hilbert_shifted), std::invalid_argument);
  EXPECT_NO_THROW(certify_fixpoint(trace, 1.0, FixpointVariant::two_over_rootpi));
}

TEST(Certificates, DominateObservationsOnRandomSchedules) {
  RngEngine engine(RngStream{4, 0});
  const EuclideanSpace space2{2};
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + engine.below(200);
    const StepSchedule sched(oracle::random_alphas(engine, n));
    for (const auto& op : dense_operators()) {
      const EuclideanSpace space{op.declared_fixed_point->size()};
      const auto x0 = op.sample_domain(engine);
      const auto trace = km_iterate(space, op, x0, sched, n);
      expect_residuals_non_increasing(trace);
      EXPECT_NO_THROW(certify_diameter(trace, *op.declared_diameter)) << op.name;
      const double dist0 = distance(space, x0, *op.declared_fixed_point);
      EXPECT_NO_THROW(certify_fixpoint(trace, dist0, FixpointVariant::hilbert_one)) << op.name;
      EXPECT_NO_THROW(certify_fixpoint(trace, dist0, FixpointVariant::hilbert_shifted)) << op.name;
      EXPECT_NO_THROW(certify_fixpoint(trace, dist0, FixpointVariant::two_over_rootpi)) << op.name;
    }
    const auto box = box_projection_operator({-0.5, 0.0}, {0.5, 1.0});
    const DenseVector far{3.0, -2.0};
    const auto trace = km_iterate(space2, box, far, sched, n);
    expect_residuals_non_increasing(trace);
    EXPECT_NO_THROW(certify_fixpoint(trace, distance(space2, far, box.apply(far)), FixpointVariant::hilbert_one));

    const L1SequenceSpace l1;
    const auto shift_trace = km_iterate(l1, shift_operator_l1(), SparseSequence::unit(0), sched, n);
    expect_residuals_non_increasing(shift_trace);
    EXPECT_NO_THROW(certify_diameter(shift_trace, 2.0));
    EXPECT_NO_THROW(certify_fixpoint(shift_trace, 1.0, FixpointVariant::two_over_rootpi));
  }
}

TEST(Convergence, FejerMonotone) {
  RngEngine engine(RngStream{5, 0});
  for (int rep = 0; rep < 20; ++rep) {
    const StepSchedule sched(oracle::random_alphas(engine, 100));
    for (const auto& op : dense_operators()) {
      const EuclideanSpace space{op.declared_fixed_point->size()};
      const auto trace = km_iterate(space, op, op.sample_domain(engine), sched, 100);
      for (std::size_t k = 1; k <= 100; ++k) {
        EXPECT_LE(distance(space, trace.points[k], *op.declared_fixed_point),
                  distance(space, trace.points[k - 1], *op.declared_fixed_point) + 1e-12);
      }
    }
  }
}

TEST(Convergence, CompactExamplesReachFixedPoint) {
  const EuclideanSpace space{2};
  const auto trace = km_iterate(space, rotation_operator(2.0), DenseVector{0.8, 0.1}, StepSchedule::constant(0.5, 400), 400);
  EXPECT_LT(space.norm(trace.points.back()), 1e-10);
  const auto box = box_projection_operator({0.0, 0.0}, {1.0, 1.0});
  const auto t2 = km_iterate(space, box, DenseVector{4.0, -3.0}, StepSchedule::constant(0.3, 200), 200);
  EXPECT_LT(t2.residuals.back(), 1e-10);
}

TEST(Hilbert, IdentityResidual) {
  EXPECT_LE(hilbert_identity_check(EuclideanSpace{5}, 10000, RngStream{6, 0}), 1e-10);
  EXPECT_THROW(hilbert_identity_check(L1SequenceSpace{}, 10, RngStream{6, 0}), std::invalid_argument);
}

TEST(Hilbert, DescentInequality) {
  RngEngine engine(RngStream{7, 0});
  const EuclideanSpace space{2};
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + engine.below(100);
    const StepSchedule sched(oracle::random_alphas(engine, n));
    const auto op = rotation_operator(engine.uniform(-3.0, 3.0));
    const auto x0 = op.sample_domain(engine);
    const auto trace = km_iterate(space, op, x0, sched, n);
    double lhs = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double a = sched.alpha(i);
      lhs += a * (1.0 - a) * trace.residuals[i - 1] * trace.residuals[i - 1];
    }
    const double r0 = space.norm(x0);
    const double rn = space.norm(trace.points.back());
    EXPECT_LE(lhs, r0 * r0 - rn * rn + 1e-8);
  }
}

TEST(Shift, ApplyAndDomain) {
  const auto op = shift_operator_l1();
  const L1SequenceSpace l1;
  const auto y = op.apply(SparseSequence::unit(0));
  EXPECT_EQ(y, SparseSequence::unit(1));
  EXPECT_EQ(distance(l1, y, SparseSequence::unit(0)), 2.0);
  EXPECT_EQ(op.declared_diameter, 2.0);
  EXPECT_THROW(op.apply(SparseSequence::unit(0, -0.1)), DomainError);
  EXPECT_THROW(op.apply(SparseSequence({{0, 0.7}, {3, 0.6}})), DomainError);
}

TEST(Shift, FirstStepByHand) {
  const L1SequenceSpace l1;
  const auto trace = km_iterate(l1, shift_operator_l1(), SparseSequence::unit(0), StepSchedule({0.5}), 1);
  EXPECT_EQ(trace.points[1], SparseSequence({{0, 0.5}, {1, 0.5}}));
}

TEST(Shift, CoordinatesArePoissonBinomial) {
  RngEngine engine(RngStream{8, 0});
  const L1SequenceSpace l1;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + engine.below(60);
    const auto alphas = oracle::random_alphas(engine, n);
    const auto trace = km_iterate(l1, shift_operator_l1(), SparseSequence::unit(0), StepSchedule(alphas), n);
    const auto pmf = stochastic::poisson_binomial_pmf(stochastic::BernoulliVector(alphas));
    const auto& xn = trace.points.back();
    double max_mass = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      EXPECT_NEAR(xn[i], pmf.mass(static_cast<std::int64_t>(i)), 1e-12);
      max_mass = std::max(max_mass, pmf.mass(static_cast<std::int64_t>(i)));
    }
    EXPECT_NEAR(trace.residuals.back(), 2.0 * max_mass, 1e-12);
  }
}

TEST(Sharpness, SmallCaseByEnumeration) {
  // m = 1, u = 1/2: alphas (1/2, 1/2), P(X = Y) = 1/2, sum_s = 1/2.
  const auto r = shift_sharpness_experiment(1, 0.5);
  EXPECT_DOUBLE_EQ(r.central_mass, 0.5);
  EXPECT_NEAR(r.observed, 0.35355339059327376, 1e-15);

  const double u = 0.3;
  const auto e = oracle::bernoulli_sum_enumerate({u, 1.0 - u});
  const auto s = shift_sharpness_experiment(1, u);
  EXPECT_NEAR(s.central_mass, e[1], 1e-15);
  EXPECT_NEAR(s.observed, e[1] * std::sqrt(2.0 * u * (1.0 - u)), 1e-15);
}

TEST(Sharpness, ApproachesEtaFromBelow) {
  const double u = sharpness_optimal_u();
  EXPECT_NEAR(2.0 * u, bounds::constants().eta_argmax, 1e-15);
  double prev_gap = 1.0;
  for (std::size_t m : {1U, 5U, 20U, 100U, 500U, 2000U}) {
    const auto r = shift_sharpness_experiment(m, u);
    EXPECT_LE(r.observed, std::numbers::inv_sqrtpi + 1e-10);
    EXPECT_GT(r.gap, 0.0);
    EXPECT_LT(r.gap, prev_gap) << m;
    prev_gap = r.gap;
  }
  const auto big = shift_sharpness_experiment(500, u);
  EXPECT_NEAR(big.observed, 0.4688, 2e-2);
  EXPECT_THROW(shift_sharpness_experiment(0, 0.5), std::invalid_argument);
  EXPECT_THROW(shift_sharpness_experiment(2, 3.0), std::invalid_argument);
}
