#include <cmath>
#include <limits>
#include <numbers>

#include "avx2_math.hpp"
#include "rrm/kernels.hpp"
#include "rrm/numerics.hpp"

namespace rrm::kernels {

namespace {

using avx2::splat;

constexpr std::size_t kLanes = 4;
// Lanes this close to the branch point, or beyond the vector exp range, go
// through the scalar routine.
constexpr double kNearBranch = numerics::kBranchPoint + 1e-6;
constexpr double kVectorMax = 1e300;

/// W0 on four lanes. Returns false (out untouched) if any lane needs the scalar path.
bool w0_vec(__m256d x, __m256d& out) {
  const __m256d safe = _mm256_and_pd(_mm256_cmp_pd(x, splat(kNearBranch), _CMP_GE_OQ),
                                     _mm256_cmp_pd(x, splat(kVectorMax), _CMP_LE_OQ));
  if (!avx2::all_true(safe)) return false;

  const __m256d one = splat(1.0);
  const __m256d two = splat(2.0);

  const __m256d near = _mm256_cmp_pd(x, splat(-0.32), _CMP_LT_OQ);
  const __m256d q = _mm256_max_pd(_mm256_fmadd_pd(splat(std::numbers::e), x, one), _mm256_setzero_pd());
  const __m256d p = _mm256_sqrt_pd(_mm256_mul_pd(two, q));
  __m256d series = _mm256_fmadd_pd(p, splat(-43.0 / 540.0), splat(11.0 / 72.0));
  series = _mm256_fmadd_pd(series, p, splat(-1.0 / 3.0));
  series = _mm256_fmadd_pd(series, p, one);
  series = _mm256_fmadd_pd(series, p, splat(-1.0));

  const __m256d l = avx2::log_pd(_mm256_add_pd(one, x));
  const __m256d wz = _mm256_mul_pd(
      l, _mm256_sub_pd(one, _mm256_div_pd(avx2::log_pd(_mm256_add_pd(one, l)), _mm256_add_pd(two, l))));

  __m256d w = _mm256_blendv_pd(wz, series, near);
  const __m256d eps2 = splat(2.0 * std::numeric_limits<double>::epsilon());
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  for (int i = 0; i < 12; ++i) {
    const __m256d ew = avx2::exp_pd(w);
    const __m256d f = _mm256_fmsub_pd(w, ew, x);
    const __m256d wp1 = _mm256_add_pd(w, one);
    const __m256d corr = _mm256_div_pd(_mm256_mul_pd(_mm256_add_pd(w, two), f), _mm256_add_pd(wp1, wp1));
    const __m256d step = _mm256_div_pd(f, _mm256_fmsub_pd(ew, wp1, corr));
    w = _mm256_sub_pd(w, step);
    const __m256d tol = _mm256_mul_pd(eps2, _mm256_add_pd(one, _mm256_and_pd(w, abs_mask)));
    if (avx2::all_true(_mm256_cmp_pd(_mm256_and_pd(step, abs_mask), tol, _CMP_LE_OQ))) break;
  }
  out = _mm256_max_pd(w, splat(-1.0));
  return true;
}

__m256d load_tail(const double* src, std::size_t n, double fill) {
  alignas(32) double buf[kLanes] = {fill, fill, fill, fill};
  for (std::size_t i = 0; i < n; ++i) buf[i] = src[i];
  return _mm256_load_pd(buf);
}

void store_tail(double* dst, __m256d v, std::size_t n) {
  alignas(32) double buf[kLanes];
  _mm256_store_pd(buf, v);
  for (std::size_t i = 0; i < n; ++i) dst[i] = buf[i];
}

void w0_avx2(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); i += kLanes) {
    const std::size_t n = std::min(kLanes, x.size() - i);
    const __m256d v = n == kLanes ? _mm256_loadu_pd(&x[i]) : load_tail(&x[i], n, 0.0);
    __m256d w;
    if (w0_vec(v, w)) {
      if (n == kLanes) {
        _mm256_storeu_pd(&out[i], w);
      } else {
        store_tail(&out[i], w, n);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) out[i + j] = numerics::lambert_w0(x[i + j]);
    }
  }
}

/// gamma_k(nu) for lanes [i, i+n). Fallback lanes use the scalar W.
__m256d gamma_group(const DeviceBlock& b, const BandParams& p, double nu, std::size_t i, std::size_t n) {
  const bool full = n == kLanes;
  const __m256d h2 = full ? _mm256_loadu_pd(&b.power_gain[i]) : load_tail(&b.power_gain[i], n, 1.0);
  const __m256d tk = full ? _mm256_loadu_pd(&b.allowed_time[i]) : load_tail(&b.allowed_time[i], n, 1.0);
  const __m256d beta = full ? _mm256_loadu_pd(&b.beta[i]) : load_tail(&b.beta[i], n, 0.0);

  const __m256d bt = _mm256_mul_pd(splat(p.bandwidth), tk);
  const __m256d ratio = _mm256_div_pd(_mm256_mul_pd(h2, splat(nu)), _mm256_mul_pd(bt, splat(p.noise)));
  const __m256d arg = _mm256_mul_pd(_mm256_sub_pd(ratio, splat(1.0)), splat(numerics::kInvE));

  __m256d w;
  if (!w0_vec(arg, w)) {
    alignas(32) double a[kLanes];
    alignas(32) double r[kLanes];
    _mm256_store_pd(a, arg);
    for (std::size_t j = 0; j < kLanes; ++j) r[j] = j < n ? numerics::lambert_w0(a[j]) : 0.0;
    w = _mm256_load_pd(r);
  }
  const __m256d denom = _mm256_add_pd(splat(1.0), w);
  const __m256d num = _mm256_mul_pd(beta, splat(p.model_size * std::numbers::ln2));
  __m256d g = _mm256_div_pd(num, _mm256_mul_pd(bt, denom));
  g = _mm256_blendv_pd(g, splat(kUnboundedDemand), _mm256_cmp_pd(denom, _mm256_setzero_pd(), _CMP_LE_OQ));
  return _mm256_blendv_pd(g, _mm256_setzero_pd(), _mm256_cmp_pd(beta, _mm256_setzero_pd(), _CMP_EQ_OQ));
}

void gamma_avx2(const DeviceBlock& b, const BandParams& p, double nu, std::span<double> out) {
  for (std::size_t i = 0; i < b.size(); i += kLanes) {
    const std::size_t n = std::min(kLanes, b.size() - i);
    const __m256d g = gamma_group(b, p, nu, i, n);
    if (n == kLanes) {
      _mm256_storeu_pd(&out[i], g);
    } else {
      store_tail(&out[i], g, n);
    }
  }
}

double sum_gamma_avx2(const DeviceBlock& b, const BandParams& p, double nu) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < b.size(); i += kLanes) {
    acc = _mm256_add_pd(acc, gamma_group(b, p, nu, i, std::min(kLanes, b.size() - i)));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void priority_avx2(std::span<const double> h2, std::span<const double> allowed,
                   std::span<const double> gamma, const BandParams& p, double tradeoff,
                   std::span<double> out) {
  const __m256d inv_scale = splat(tradeoff / (p.noise * p.model_size * std::numbers::ln2));
  const __m256d bw_over_l = splat(p.bandwidth / p.model_size);
  const __m256d inv_ln2 = splat(std::numbers::log2e);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < h2.size(); i += kLanes) {
    const std::size_t n = std::min(kLanes, h2.size() - i);
    const bool full = n == kLanes;
    const __m256d hv = full ? _mm256_loadu_pd(&h2[i]) : load_tail(&h2[i], n, 1.0);
    const __m256d tv = full ? _mm256_loadu_pd(&allowed[i]) : load_tail(&allowed[i], n, 0.0);
    const __m256d gv = full ? _mm256_loadu_pd(&gamma[i]) : load_tail(&gamma[i], n, 0.0);
    const __m256d arg = _mm256_mul_pd(hv, inv_scale);
    // log_pd covers positive normal inputs only; anything else takes the scalar route.
    const __m256d normal = _mm256_and_pd(_mm256_cmp_pd(arg, splat(std::numeric_limits<double>::min()), _CMP_GE_OQ),
                                         _mm256_cmp_pd(arg, splat(std::numeric_limits<double>::max()), _CMP_LE_OQ));
    __m256d lg;
    if (avx2::all_true(normal)) {
      lg = _mm256_mul_pd(avx2::log_pd(arg), inv_ln2);
    } else {
      alignas(32) double a[kLanes];
      _mm256_store_pd(a, arg);
      for (double& v : a) v = std::log2(v);
      lg = _mm256_load_pd(a);
    }
    __m256d r = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(gv, tv), bw_over_l), lg);
    const __m256d active = _mm256_and_pd(_mm256_cmp_pd(gv, zero, _CMP_GT_OQ), _mm256_cmp_pd(tv, zero, _CMP_GT_OQ));
    r = _mm256_and_pd(r, active);
    if (full) {
      _mm256_storeu_pd(&out[i], r);
    } else {
      store_tail(&out[i], r, n);
    }
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, "avx2", &w0_avx2, &gamma_avx2, &sum_gamma_avx2, &priority_avx2};
  return cpu_has_avx2() ? &table : nullptr;
}

}  // namespace rrm::kernels
