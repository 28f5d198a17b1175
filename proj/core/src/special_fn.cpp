#include "kmrate/special_fn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kmrate::special_fn {

namespace mp = boost::multiprecision;

double to_double(const ExactRational& q) {
  BigInt num = mp::numerator(q);
  BigInt den = mp::denominator(q);
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  if (negative) num = -num;

  // Scale so the integer quotient carries ~80 significant bits, then keep the
  // top 64 with a sticky bit for the discarded remainder.
  const long scale = 80 - (static_cast<long>(mp::msb(num)) - static_cast<long>(mp::msb(den)));
  if (scale > 0) {
    num <<= scale;
  } else {
    den <<= -scale;
  }
  BigInt rem;
  BigInt quot;
  mp::divide_qr(num, den, quot, rem);
  const long extra = static_cast<long>(mp::msb(quot)) - 63;
  bool sticky = rem != 0;
  if (extra > 0) {
    BigInt low = quot & ((BigInt(1) << extra) - 1);
    sticky = sticky || low != 0;
    quot >>= extra;
  }
  auto top = static_cast<std::uint64_t>(quot);
  // Round-to-nearest on the 64 -> 53 bit conversion needs to see the sticky bit.
  if (sticky) top |= 1U;
  const double value = std::ldexp(static_cast<double>(top), static_cast<int>(extra > 0 ? extra : 0) - static_cast<int>(scale));
  return negative ? -value : value;
}

ExactRational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("from_double: non-finite value");
  if (x == 0.0) return ExactRational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  const int shift = exponent - 53;
  ExactRational r{BigInt(scaled)};
  if (shift >= 0) {
    r *= ExactRational(BigInt(1) << shift);
  } else {
    r /= ExactRational(BigInt(1) << -shift);
  }
  return r;
}

BigInt binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

ExactRational ballot_F(std::uint32_t m) {
  return ExactRational(binomial(m, m / 2), BigInt(1) << m);
}

double ballot_F_value(std::uint64_t m) {
  double f = 1.0;
  for (std::uint64_t k = 1; k <= m; k += 2) {
    f *= static_cast<double>(k) / static_cast<double>(k + 1);
  }
  return f;
}

BigInt catalan(std::uint32_t k) {
  return binomial(2 * k, k) / (k + 1);
}

BigInt catalan_alternating_sum(std::uint32_t k) {
  BigInt sum = 0;
  BigInt binom_kj = 1;  // binom(k, j)
  for (std::uint32_t j = 0; j <= k; ++j) {
    BigInt term = binom_kj * binomial(j, j / 2) << (k - j);
    if (j % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
    binom_kj = binom_kj * (k - j) / (j + 1);
  }
  return sum;
}

namespace {

constexpr double kSeriesCutoff = 20.0;

// e^{-z} I_nu(z) by the power series, nu in {0, 1}. All terms are positive.
double scaled_series(int order, double z) {
  const double q = 0.25 * z * z;
  double term = order == 0 ? 1.0 : 0.5 * z;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(-z) * sum;
}

// Large-argument expansion of e^{-z} I_nu(z):
// (2 pi z)^{-1/2} Sum_k prod_{j<=k} ((2j-1)^2 - 4 nu^2) / (k! (8z)^k).
double scaled_asymptotic(int order, double z) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double previous = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (odd * odd - mu) / (8.0 * k * z);
    const double magnitude = std::abs(term);
    if (magnitude > previous) break;  // divergent tail begins
    sum += term;
    if (magnitude < 1e-17 * std::abs(sum)) break;
    previous = magnitude;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

void check_order(int order) {
  if (order != 0 && order != 1) throw std::invalid_argument("bessel_I: order must be 0 or 1");
}

}  // namespace

double bessel_I_scaled(int order, double z) {
  check_order(order);
  if (!(z >= 0.0)) throw std::domain_error("bessel_I: z must be non-negative");
  if (std::isinf(z)) return 0.0;
  return z <= kSeriesCutoff ? scaled_series(order, z) : scaled_asymptotic(order, z);
}

double bessel_I(int order, double z) {
  check_order(order);
  if (!(z >= 0.0)) throw std::domain_error("bessel_I: z must be non-negative");
  if (z > kBesselUnscaledMax) throw BesselOverflow("bessel_I: argument beyond supported range");
  return std::exp(z) * bessel_I_scaled(order, z);
}

BesselPair bessel_pair_scaled(double z) {
  return BesselPair{z, bessel_I_scaled(0, z), bessel_I_scaled(1, z)};
}

BesselPair bessel_pair(double z) {
  return BesselPair{z, bessel_I(0, z), bessel_I(1, z)};
}

namespace {

struct Dyadic {
  BigInt numerator;
  BigInt denominator;
  long denominator_log2 = -1;  // >= 0 iff denominator is a power of two
};

Dyadic split(const ExactRational& u) {
  Dyadic d{mp::numerator(u), mp::denominator(u)};
  const auto lsb = static_cast<long>(mp::lsb(d.denominator));
  if (d.denominator == (BigInt(1) << lsb)) d.denominator_log2 = lsb;
  return d;
}

// Integer numerator of Sum_k (-1)^k C_k binom(n,k) a^k (2b)^{n-k}, the
// hypergeometric sum scaled by (2b)^n where u = a/b.
BigInt scaled_sum(std::uint32_t n, const Dyadic& u, const std::vector<BigInt>& catalan_times_power) {
  BigInt total = 0;
  BigInt binom_nk = 1;
  BigInt two_b = 2 * u.denominator;
  std::vector<BigInt> two_b_powers;
  if (u.denominator_log2 < 0) {
    two_b_powers.resize(n + 1);
    two_b_powers[0] = 1;
    for (std::uint32_t i = 1; i <= n; ++i) two_b_powers[i] = two_b_powers[i - 1] * two_b;
  }
  for (std::uint32_t k = 0; k <= n; ++k) {
    BigInt term = binom_nk * catalan_times_power[k];
    if (u.denominator_log2 >= 0) {
      term <<= static_cast<unsigned long>((u.denominator_log2 + 1) * static_cast<long>(n - k));
    } else {
      term *= two_b_powers[n - k];
    }
    if (k % 2 == 0) {
      total += term;
    } else {
      total -= term;
    }
    binom_nk = binom_nk * (n - k) / (k + 1);
  }
  return total;
}

std::vector<BigInt> catalan_power_table(std::uint32_t n, const BigInt& a) {
  std::vector<BigInt> table(n + 1);
  BigInt c = 1;  // C_k
  BigInt a_pow = 1;
  for (std::uint32_t k = 0; k <= n; ++k) {
    table[k] = c * a_pow;
    c = c * 2 * (2 * k + 1) / (k + 2);
    a_pow *= a;
  }
  return table;
}

ExactRational assemble(std::uint32_t n, const Dyadic& u, const BigInt& scaled) {
  BigInt denominator;
  if (u.denominator_log2 >= 0) {
    denominator = BigInt(1) << static_cast<unsigned long>((u.denominator_log2 + 1) * static_cast<long>(n));
  } else {
    denominator = mp::pow(BigInt(2 * u.denominator), n);
  }
  return ExactRational(scaled, denominator);
}

}  // namespace

ExactRational hyp2f1_terminating_exact(std::uint32_t n, const ExactRational& u) {
  if (u < 0 || u > ExactRational(1, 2)) {
    throw std::domain_error("hyp2f1_terminating: u must lie in [0, 1/2]");
  }
  const Dyadic d = split(u);
  const auto table = catalan_power_table(n, d.numerator);
  return assemble(n, d, scaled_sum(n, d, table));
}

double hyp2f1_terminating(std::uint32_t n, double u) {
  return to_double(hyp2f1_terminating_exact(n, from_double(u)));
}

std::vector<double> hyp2f1_terminating_sequence(std::uint32_t n_max, double u) {
  const ExactRational exact_u = from_double(u);
  if (exact_u < 0 || exact_u > ExactRational(1, 2)) {
    throw std::domain_error("hyp2f1_terminating: u must lie in [0, 1/2]");
  }
  const Dyadic d = split(exact_u);
  const auto table = catalan_power_table(n_max, d.numerator);
  std::vector<double> values;
  values.reserve(n_max);
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    values.push_back(to_double(assemble(n, d, scaled_sum(n, d, table))));
  }
  return values;
}

double euler_integral_check(std::uint32_t n, double u) {
  if (n < 1) throw std::domain_error("euler_integral_check: n must be >= 1");
  if (!(u > 0.0 && u <= 0.5)) throw std::domain_error("euler_integral_check: u must lie in (0, 1/2]");
  // t = sin^2(theta) turns t^{-1/2}(1-t)^{1/2} dt into 2 cos^2(theta) dtheta,
  // which is smooth on the whole interval.
  auto integrand = [n, u](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return 2.0 * c * c * std::pow(1.0 - 2.0 * u * s * s, static_cast<double>(n));
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numbers::pi / 2.0, 15, 1e-12, &error);
  return 2.0 / std::numbers::pi * integral;
}

}  // namespace kmrate::special_fn
