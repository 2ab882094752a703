#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rrm/errors.hpp"

namespace rrm::numerics {

/// -1/e, the left end of the real domain of W0.
inline constexpr double kInvE = 0.36787944117144232159552377016146086744581113;
inline constexpr double kBranchPoint = -kInvE;

/**
 * Principal branch of the Lambert W function.
 *
 * Halley iteration started from a series expansion around the branch point
 * (x < -0.32) or Winitzki's global approximation elsewhere. Very large
 * arguments are solved in log space (w + ln w = ln x) so e^w never overflows.
 *
 * Throws DomainError for x < -1/e or NaN.
 */
double lambert_w0(double x);

/// Search interval for a root of a decreasing function.
struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-10;

  void validate() const;
};

struct BisectOptions {
  int max_expansions = 200;  ///< doublings of the bracket width before giving up
  int max_iterations = 4000;
};

struct BisectReport {
  double root = 0.0;
  double f_root = 0.0;
  int iterations = 0;
  int expansions = 0;
};

/**
 * Root of a continuous strictly decreasing f on [lo, hi].
 *
 * Requires f(lo) > 0. If f(hi) >= 0 the upper end is pushed out to
 * lo + 2(hi - lo) repeatedly, up to opts.max_expansions times. Terminates
 * when |f(mid)| <= tol, when hi - lo <= tol * max(|lo|, |hi|), or when the
 * interval cannot be split further in double precision.
 */
template <class F>
BisectReport bisect_decreasing_report(F&& f, RootBracket bracket, BisectOptions opts = {}) {
  bracket.validate();
  double lo = bracket.lo;
  double hi = bracket.hi;
  const double f_lo = f(lo);
  if (!(f_lo > 0.0)) {
    throw BracketError("bisect_decreasing: f(lo) must be positive, got " + std::to_string(f_lo));
  }
  BisectReport report;
  double f_hi = f(hi);
  while (!(f_hi < 0.0)) {
    if (f_hi == 0.0) {
      report.root = hi;
      return report;
    }
    if (report.expansions >= opts.max_expansions) {
      throw BracketError("bisect_decreasing: no sign change after " +
                         std::to_string(opts.max_expansions) + " expansions");
    }
    const double width = hi - lo;
    lo = hi;  // f(hi) > 0, so the old hi is a valid lower end
    hi = lo + 2.0 * width;
    f_hi = f(hi);
    ++report.expansions;
  }

  double f_lo_cur = f(lo);
  while (report.iterations < opts.max_iterations) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    ++report.iterations;
    const double f_mid = f(mid);
    if (std::abs(f_mid) <= bracket.tol || hi - lo <= bracket.tol * std::max(std::abs(lo), std::abs(hi))) {
      report.root = mid;
      report.f_root = f_mid;
      return report;
    }
    if (f_mid > 0.0) {
      lo = mid;
      f_lo_cur = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  // Interval exhausted at double resolution: keep the endpoint closer to the root.
  if (std::abs(f_lo_cur) < std::abs(f_hi)) {
    report.root = lo;
    report.f_root = f_lo_cur;
  } else {
    report.root = hi;
    report.f_root = f_hi;
  }
  return report;
}

template <class F>
double bisect_decreasing(F&& f, RootBracket bracket, BisectOptions opts = {}) {
  return bisect_decreasing_report(std::forward<F>(f), bracket, opts).root;
}

}  // namespace rrm::numerics
