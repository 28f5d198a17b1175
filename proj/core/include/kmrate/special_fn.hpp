#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kmrate::special_fn {

using BigInt = boost::multiprecision::cpp_int;
/// Arbitrary-precision rational, always normalized (lowest terms, positive denominator).
using ExactRational = boost::multiprecision::cpp_rational;

/// Converts an exact rational to the nearest double.
double to_double(const ExactRational& q);

/// Exact rational value of a finite double (every double is a dyadic rational).
ExactRational from_double(double x);

BigInt binomial(std::uint32_t n, std::uint32_t k);

/// Ballot function F(m) = binom(m, floor(m/2)) / 2^m: the probability that a
/// symmetric +-1 walk of length m never goes below zero.
ExactRational ballot_F(std::uint32_t m);

/// Floating-point F(m) via the ratio recurrence F(2j+1) = F(2j) (2j+1)/(2j+2),
/// F(2j+2) = F(2j+1). No overflow for any m.
double ballot_F_value(std::uint64_t m);

BigInt catalan(std::uint32_t k);

/// Sum_{j=0}^k (-1)^j 2^{k-j} binom(k,j) binom(j, floor(j/2)) in integer arithmetic.
BigInt catalan_alternating_sum(std::uint32_t k);

struct BesselPair {
  double z = 0.0;
  double i0 = 1.0;
  double i1 = 0.0;
};

/// Thrown when an unscaled Bessel value would overflow a double.
class BesselOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Largest argument accepted by the unscaled evaluators.
inline constexpr double kBesselUnscaledMax = 700.0;

/// Exponentially scaled e^{-z} I_order(z), order in {0, 1}, any z >= 0.
double bessel_I_scaled(int order, double z);

/// I_order(z), order in {0, 1}, 0 <= z <= kBesselUnscaledMax.
double bessel_I(int order, double z);

/// Scaled pair (e^{-z} I0(z), e^{-z} I1(z)), stored in the i0/i1 fields.
BesselPair bessel_pair_scaled(double z);
BesselPair bessel_pair(double z);

/// Terminating 2F1(-n, 1/2; 2; 2u) written as the finite sum
/// Sum_{k=0}^n (-1)^k/(k+1) binom(2k,k) binom(n,k) (u/2)^k.
/// Accumulated exactly in rationals, rounded once at the end.
ExactRational hyp2f1_terminating_exact(std::uint32_t n, const ExactRational& u);
double hyp2f1_terminating(std::uint32_t n, double u);

/// hyp2f1_terminating(n, u) for n = 1..n_max, sharing the per-k coefficient table.
std::vector<double> hyp2f1_terminating_sequence(std::uint32_t n_max, double u);

/// (2/pi) Int_0^1 t^{-1/2} (1-t)^{1/2} (1 - 2ut)^n dt, evaluated after t = sin^2(theta) with
/// adaptive Gauss-Kronrod. Independent route to hyp2f1_terminating.
double euler_integral_check(std::uint32_t n, double u);

}  // namespace kmrate::special_fn
