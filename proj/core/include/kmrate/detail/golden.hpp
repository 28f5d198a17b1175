#pragma once

#include <cmath>
#include <initializer_list>
#include <utility>

namespace kmrate::detail {

struct LineMax {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi]. The
// endpoints are compared against the interior optimum at the end so that
// boundary maxima are returned exactly.
template <typename F>
LineMax golden_section_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  LineMax best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe > best.value) best = LineMax{edge, fe};
  }
  return best;
}

}  // namespace kmrate::detail
