#include "multirank/kernels.hpp"

// AVX2 variants, 4 doubles per lane. Masks are byte arrays; bytes widen to
// 64-bit lane masks through _mm256_cvtepu8_epi64. This TU is compiled with
// -mavx2 only (no FMA) so the elementwise ops stay bit-identical to the
// scalar reference; only the reductions reassociate.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

namespace multirank::kernels {
namespace {

inline __m256d mask4(const std::uint8_t* mask, std::size_t i) {
  int packed;
  std::memcpy(&packed, mask + i, sizeof(packed));
  __m128i bytes = _mm_cvtsi32_si128(packed);
  __m256i wide = _mm256_cvtepu8_epi64(bytes);
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double reduce_sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double sum_where_avx2(const double* x, const std::uint8_t* mask, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_and_pd(_mm256_loadu_pd(x + i), mask4(mask, i));
    acc = _mm256_add_pd(acc, v);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    if (mask[i]) total += x[i];
  }
  return total;
}

void scale_avx2(double* x, std::size_t n, double c) {
  __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  }
  for (; i < n; ++i) x[i] *= c;
}

void scale_where_avx2(double* x, const std::uint8_t* mask, std::size_t n, double c) {
  __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d scaled = _mm256_mul_pd(v, vc);
    _mm256_storeu_pd(x + i, _mm256_blendv_pd(v, scaled, mask4(mask, i)));
  }
  for (; i < n; ++i) {
    if (mask[i]) x[i] *= c;
  }
}

void axpy_where_avx2(double* y, const std::uint8_t* mask, std::size_t n, double a) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(y + i);
    __m256d bumped = _mm256_add_pd(v, va);
    _mm256_storeu_pd(y + i, _mm256_blendv_pd(v, bumped, mask4(mask, i)));
  }
  for (; i < n; ++i) {
    if (mask[i]) y[i] += a;
  }
}

void edge_combine_avx2(const double* pos_above, const double* neg_above, std::size_t n,
                       double neg_total, double pos_total, double* out) {
  __m256d vn = _mm256_set1_pd(neg_total);
  __m256d vp = _mm256_set1_pd(pos_total);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d lhs = _mm256_mul_pd(_mm256_loadu_pd(pos_above + i), vn);
    __m256d rhs = _mm256_mul_pd(vp, _mm256_loadu_pd(neg_above + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(lhs, rhs));
  }
  for (; i < n; ++i) {
    out[i] = pos_above[i] * neg_total - pos_total * neg_above[i];
  }
}

void threshold_ge_avx2(const double* value, const std::uint8_t* present, std::size_t n,
                       double threshold, std::uint8_t fallback, std::uint8_t* out) {
  __m256d vt = _mm256_set1_pd(threshold);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(value + i), vt, _CMP_GE_OQ);
    int bits = _mm256_movemask_pd(ge);
    for (int k = 0; k < 4; ++k) {
      out[i + k] = present[i + k] ? static_cast<std::uint8_t>((bits >> k) & 1) : fallback;
    }
  }
  for (; i < n; ++i) {
    out[i] = present[i] ? static_cast<std::uint8_t>(value[i] >= threshold) : fallback;
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{
      "avx2",           reduce_sum_avx2, sum_where_avx2,    scale_avx2,
      scale_where_avx2, axpy_where_avx2, edge_combine_avx2, threshold_ge_avx2,
  };
  return ops;
}

}  // namespace multirank::kernels

#endif  // x86_64
