#include "rrm/numerics.hpp"

#include <limits>

namespace rrm::numerics {

namespace {

constexpr int kMaxHalleySteps = 12;
// Beyond this argument e^w may overflow during Halley; switch to log space.
constexpr double kLogSpaceThreshold = 1e300;

double branch_series(double x) {
  // p = sqrt(2(ex + 1)); W = -1 + p - p^2/3 + 11p^3/72 - 43p^4/540 + ...
  const double p = std::sqrt(2.0 * std::fma(std::numbers::e, x, 1.0));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

double winitzki(double x) {
  const double l = std::log1p(x);
  return l * (1.0 - std::log1p(l) / (2.0 + l));
}

double log_space_solve(double x) {
  // w + ln w = ln x, Newton on g(w) = w + ln w - ln x.
  const double lx = std::log(x);
  double w = lx - std::log(lx);
  for (int i = 0; i < 50; ++i) {
    const double step = (w + std::log(w) - lx) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * w) break;
  }
  return w;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x < kBranchPoint) {
    throw DomainError("lambert_w0: argument below -1/e: " + std::to_string(x));
  }
  if (x == kBranchPoint) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  if (x > kLogSpaceThreshold) return log_space_solve(x);

  double w = x < -0.32 ? branch_series(x) : winitzki(x);
  for (int i = 0; i < kMaxHalleySteps; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w < -1.0 ? -1.0 : w;
}

void RootBracket::validate() const {
  if (!(lo < hi)) throw BracketError("RootBracket: lo must be below hi");
  if (!(tol > 0.0)) throw BracketError("RootBracket: tol must be positive");
}

}  // namespace rrm::numerics
