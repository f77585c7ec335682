#pragma once

#include <cmath>
#include <utility>

#include "fgamma/common.hpp"

namespace fgamma {

struct ScalarMinimum {
  double x = 0.0;
  double value = kInf;
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Golden-section search for a convex function on [lo, hi].
///
/// +inf objective values are allowed; {fn < inf} must be an interval that
/// meets the bracket. Stops when the bracket is narrower than tol. The
/// returned point is the best one evaluated, endpoints included.
template <typename Fn>
ScalarMinimum golden_section_minimize(Fn&& fn, double lo, double hi, double tol,
                                      int max_iterations = 400) {
  constexpr double kInvPhi = 0.6180339887498948482;
  ScalarMinimum out;
  out.lo = lo;
  out.hi = hi;

  auto consider = [&out](double x, double v) {
    if (v < out.value) {
      out.x = x;
      out.value = v;
    }
  };

  const double f_lo = fn(lo);
  consider(lo, f_lo);
  if (!(hi > lo)) return out;
  const double f_hi = fn(hi);
  consider(hi, f_hi);

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  consider(c, fc);
  consider(d, fd);

  int it = 0;
  while (b - a > tol && it < max_iterations) {
    ++it;
    bool keep_left;
    if (std::isinf(fc) && std::isinf(fd)) {
      keep_left = std::isinf(f_hi) && !std::isinf(f_lo);
    } else {
      keep_left = fc < fd;
    }
    if (keep_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
      consider(d, fd);
    }
  }
  out.iterations = it;
  return out;
}

}  // namespace fgamma
