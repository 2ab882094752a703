#pragma once

// Double-precision exp/log on __m256d. Only included from translation units
// compiled with -mavx2 -mfma.

#include <immintrin.h>

#include <cstdint>

namespace rrm::kernels::avx2 {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

/// e^x for x in [-708, 709]; inputs outside are clamped. Cody-Waite reduction
/// by ln2 followed by a degree-13 Taylor polynomial on |r| <= ln2/2.
inline __m256d exp_pd(__m256d x) {
  const __m256d ln2_hi = splat(6.93147180369123816490e-01);
  const __m256d ln2_lo = splat(1.90821492927058770002e-10);
  x = _mm256_min_pd(_mm256_max_pd(x, splat(-708.0)), splat(709.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = splat(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, splat(0.5));
  p = _mm256_fmadd_pd(p, r, splat(1.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

/// Natural log for positive normal x. Mantissa reduced to [sqrt(1/2), sqrt(2)),
/// then 2 atanh(s) with s = (m-1)/(m+1) summed to s^21.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent as double via the 2^52 trick.
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)),
                            splat(4503599627370496.0 + 1023.0));

  const __m256d big = _mm256_cmp_pd(m, splat(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, splat(1.0)));

  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, splat(1.0)), _mm256_add_pd(m, splat(1.0)));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = splat(1.0 / 21.0);
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, z, splat(1.0));
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(s, s), p);
  return _mm256_fmadd_pd(e, splat(0.6931471805599453094), log_m);
}

inline bool all_true(__m256d mask) { return _mm256_movemask_pd(mask) == 0xF; }
inline bool any_true(__m256d mask) { return _mm256_movemask_pd(mask) != 0; }

}  // namespace rrm::kernels::avx2
