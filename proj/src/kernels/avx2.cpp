#include <immintrin.h>

#include <limits>

#include "bmg/kernels/kernels.hpp"

namespace bmg::kernels {
namespace avx2 {

void gather2_mul(double* out, const double* src, const std::int32_t* parent, const double* row,
                 const std::int32_t* idx, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i pi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(parent + i));
    const __m128i ri = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d a = _mm256_i32gather_pd(src, pi, 8);
    const __m256d b = _mm256_i32gather_pd(row, ri, 8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(a, b));
  }
  for (; i < n; ++i) out[i] = src[parent[i]] * row[idx[i]];
}

void gather_mul_add(double* acc, const double* col, const std::int32_t* idx, const double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i ci = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d c = _mm256_i32gather_pd(col, ci, 8);
    const __m256d prod = _mm256_mul_pd(c, _mm256_loadu_pd(w + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  for (; i < n; ++i) {
    const double prod = col[idx[i]] * w[i];
    acc[i] = acc[i] + prod;
  }
}

void scale_add(double* acc, double s, const double* x, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(sv, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  for (; i < n; ++i) {
    const double prod = s * x[i];
    acc[i] = acc[i] + prod;
  }
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d mv = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) mv = _mm256_max_pd(mv, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, mv);
    for (double v : lanes) m = v > m ? v : m;
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

}  // namespace avx2

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", avx2::gather2_mul, avx2::gather_mul_add, avx2::scale_add, avx2::max_value};
  return table;
}

}  // namespace bmg::kernels
