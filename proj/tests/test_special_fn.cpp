#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "kmrate/special_fn.hpp"
#include "oracles.hpp"

using namespace kmrate::special_fn;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> z(points);
  for (int i = 0; i < points; ++i) z[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return z;
}

}  // namespace

TEST(Ballot, SmallValues) {
  EXPECT_EQ(ballot_F(0), ExactRational(1));
  EXPECT_EQ(ballot_F(1), ExactRational(1, 2));
  EXPECT_EQ(ballot_F(4), ExactRational(3, 8));
}

TEST(Ballot, MatchesWalkEnumeration) {
  for (unsigned m = 0; m <= 20; ++m) {
    EXPECT_EQ(ballot_F(m), ExactRational(BigInt(oracle::nonneg_walks_enumerate(m)), BigInt(1) << m)) << m;
  }
}

TEST(Ballot, MatchesPathCountingUpTo60) {
  for (unsigned m = 0; m <= 60; ++m) EXPECT_EQ(ballot_F(m), oracle::exact_ballot(m)) << m;
}

TEST(Ballot, PairsAndMonotone) {
  for (unsigned j = 0; j < 40; ++j) EXPECT_EQ(ballot_F(2 * j + 1), ballot_F(2 * j + 2)) << j;
  for (unsigned m = 1; m <= 80; ++m) EXPECT_LE(ballot_F(m), ballot_F(m - 1));
}

TEST(Ballot, FloatValueTracksExact) {
  for (unsigned m = 0; m <= 300; ++m) {
    EXPECT_NEAR(ballot_F_value(m), to_double(ballot_F(m)), 1e-14 * to_double(ballot_F(m))) << m;
  }
  EXPECT_GT(ballot_F_value(1'000'000), 0.0);
}

TEST(Catalan, KnownValues) {
  EXPECT_EQ(catalan(0), 1);
  EXPECT_EQ(catalan(3), 5);
  EXPECT_EQ(catalan(10), 16796);
}

TEST(Catalan, AlternatingSumIdentity) {
  EXPECT_EQ(catalan_alternating_sum(0), 1);
  EXPECT_EQ(catalan_alternating_sum(3), 5);
  for (unsigned k = 0; k <= 30; ++k) EXPECT_EQ(catalan_alternating_sum(k), catalan(k)) << k;
}

TEST(Conversion, RoundTripsAndRounds) {
  EXPECT_EQ(to_double(ExactRational(1, 3)), 1.0 / 3.0);
  EXPECT_EQ(to_double(ExactRational(-7, 10)), -0.7);
  for (double x : {0.1, 1e-300, 12345.678, -2.5e200, 0.7899784213435679}) {
    EXPECT_EQ(to_double(from_double(x)), x);
  }
}

TEST(Bessel, Origin) {
  EXPECT_EQ(bessel_I(0, 0.0), 1.0);
  EXPECT_EQ(bessel_I(1, 0.0), 0.0);
}

TEST(Bessel, SeriesOracleAtOne) {
  const double i0 = static_cast<double>(oracle::bessel_series(0, 1.0L, 30));
  const double i1 = static_cast<double>(oracle::bessel_series(1, 1.0L, 30));
  EXPECT_NEAR(bessel_I(0, 1.0), i0, 1e-15 * i0);
  EXPECT_NEAR(bessel_I(1, 1.0), i1, 1e-15 * i1);
}

TEST(Bessel, FrozenScaledValues) {
  // e^{-z} I0(z), e^{-z} I1(z) at 40 significant digits.
  struct Row {
    double z, i0, i1;
  };
  const Row rows[] = {
      {0.5, 0.64503527044915006811, 0.15642080318487169714},
      {5.0, 0.18354081260932835307, 0.16397226694454235693},
      {19.9, 0.090008588864389597294, 0.087717102131706101082},
      {20.1, 0.089553763620613444035, 0.087296851843201591986},
      {50.0, 0.05656162664745419253, 0.055993123892895399644},
      {300.0, 0.023042558415085461794, 0.023004122040268950902},
      {700.0, 0.015081295651531357587, 0.015070519444716846949},
  };
  for (const auto& r : rows) {
    EXPECT_NEAR(bessel_I_scaled(0, r.z), r.i0, 1e-13 * r.i0) << r.z;
    EXPECT_NEAR(bessel_I_scaled(1, r.z), r.i1, 1e-13 * r.i1) << r.z;
  }
}

TEST(Bessel, MatchesStandardLibrary) {
  for (double z : log_grid(1e-3, 700.0, 400)) {
    for (int order : {0, 1}) {
      const double ref = std::cyl_bessel_i(static_cast<double>(order), z);
      EXPECT_NEAR(bessel_I(order, z), ref, 1e-12 * ref) << order << " " << z;
    }
  }
}

TEST(Bessel, PairInvariants) {
  for (double z : log_grid(0.01, 700.0, 100)) {
    const auto b = bessel_pair(z);
    EXPECT_GE(b.i0, 1.0);
    EXPECT_GE(b.i1, 0.0);
    EXPECT_LT(b.i1, b.i0);
  }
}

TEST(Bessel, RejectsBadInput) {
  EXPECT_THROW(bessel_I(0, 701.0), BesselOverflow);
  EXPECT_THROW(bessel_I(2, 1.0), std::invalid_argument);
  EXPECT_THROW(bessel_I(0, -1.0), std::domain_error);
  EXPECT_NO_THROW(bessel_I_scaled(0, 1e6));
}

TEST(Bessel, TuranInequality) {
  for (double z : log_grid(0.01, 100.0, 300)) {
    const double i0 = bessel_I_scaled(0, z);
    const double i1 = bessel_I_scaled(1, z);
    const double i2 = i0 - 2.0 / z * i1;
    EXPECT_LE(i0 * i2, i1 * i1 * (1.0 + 1e-12)) << z;
  }
}

TEST(Bessel, EnvelopeKeyInequality) {
  for (double z : log_grid(0.01, 100.0, 300)) {
    EXPECT_LE(z * bessel_I_scaled(0, z), 2.0 * (1.0 + z) * bessel_I_scaled(1, z)) << z;
  }
}

TEST(Hypergeometric, Examples) {
  for (unsigned n : {1U, 5U, 40U}) EXPECT_EQ(hyp2f1_terminating(n, 0.0), 1.0);
  EXPECT_EQ(hyp2f1_terminating_exact(1, ExactRational(1, 2)), ExactRational(3, 4));
  EXPECT_EQ(hyp2f1_terminating_exact(5, ExactRational(3, 10)), ExactRational(901597, 1600000));
  EXPECT_NEAR(hyp2f1_terminating(5, 0.3), 0.563498125, 1e-15);
}

TEST(Hypergeometric, MatchesBinomialExpectation) {
  for (unsigned n = 1; n <= 25; ++n) {
    for (int i = 1; i <= 10; ++i) {
      const double u = 0.05 * i;
      const double expected = to_double(oracle::binomial_ballot_expectation(n, from_double(u)));
      EXPECT_NEAR(hyp2f1_terminating(n, u), expected, 1e-12) << n << " " << u;
    }
  }
}

TEST(Hypergeometric, ExactAgreesWithOracleForRationalU) {
  for (unsigned n = 1; n <= 15; ++n) {
    const ExactRational u(2, 7);
    EXPECT_EQ(hyp2f1_terminating_exact(n, u), oracle::binomial_ballot_expectation(n, u));
  }
}

TEST(Hypergeometric, SequenceMatchesPointwise) {
  for (double u : {0.5, 0.3, 0.1}) {
    const auto seq = hyp2f1_terminating_sequence(60, u);
    ASSERT_EQ(seq.size(), 60U);
    for (unsigned n = 1; n <= 60; ++n) EXPECT_EQ(seq[n - 1], hyp2f1_terminating(n, u));
  }
}

TEST(Hypergeometric, RejectsOutOfRange) {
  EXPECT_THROW(hyp2f1_terminating(3, 0.6), std::domain_error);
  EXPECT_THROW(hyp2f1_terminating(3, -0.1), std::domain_error);
}

TEST(EulerIntegral, Examples) {
  EXPECT_NEAR(euler_integral_check(1, 0.5), 0.75, 1e-9);
  EXPECT_NEAR(euler_integral_check(10, 0.25), 0.46383517608046531677, 1e-9);
  EXPECT_NEAR(euler_integral_check(10, 1e-9), 1.0, 1e-7);
}

TEST(EulerIntegral, AgreesWithExactSum) {
  for (unsigned n = 1; n <= 200; n += 13) {
    for (double u : {0.5, 0.37, 0.25, 0.1, 0.01}) {
      EXPECT_NEAR(euler_integral_check(n, u), hyp2f1_terminating(n, u), 1e-9) << n << " " << u;
    }
  }
}

TEST(EulerIntegral, RejectsOutOfRange) {
  EXPECT_THROW(euler_integral_check(0, 0.3), std::domain_error);
  EXPECT_THROW(euler_integral_check(3, 0.0), std::domain_error);
}
