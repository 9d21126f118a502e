// Compiled with -mavx2 (no -mfma): every multiply and add is rounded
// separately, matching the scalar reference bit for bit.

#include <immintrin.h>

#include <vector>

#include "normdyn/kernels.hpp"

namespace normdyn::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}

void replicator_flow(const double* gamma, std::size_t n, const double* x, double* out,
                     std::size_t m) {
  const std::size_t full = m - m % kLanes;
  std::vector<double> f(n * kLanes);
  for (std::size_t k = 0; k < full; k += kLanes) {
    for (std::size_t i = 0; i < n; ++i) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d xj = _mm256_loadu_pd(x + j * m + k);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(gamma[i * n + j]), xj));
      }
      _mm256_storeu_pd(f.data() + i * kLanes, acc);
    }
    __m256d mean = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      mean = _mm256_add_pd(mean, _mm256_mul_pd(_mm256_loadu_pd(x + i * m + k), _mm256_loadu_pd(f.data() + i * kLanes)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d xi = _mm256_loadu_pd(x + i * m + k);
      _mm256_storeu_pd(out + i * m + k, _mm256_mul_pd(xi, _mm256_sub_pd(_mm256_loadu_pd(f.data() + i * kLanes), mean)));
    }
  }
  scalar::replicator_flow(gamma, n, x, out, m, full);
}

void chicken_gamma(const double* b_in, const double* L_in, double* out, std::size_t m) {
  const std::size_t full = m - m % kLanes;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  const __m256d one_half = _mm256_set1_pd(1.5);
  const __m256d two_half = _mm256_set1_pd(2.5);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t k = 0; k < full; k += kLanes) {
    const __m256d b = _mm256_loadu_pd(b_in + k);
    const __m256d L = _mm256_loadu_pd(L_in + k);
    const __m256d lp1 = _mm256_add_pd(L, one);
    const __m256d lp3 = _mm256_add_pd(L, three);
    const __m256d q = _mm256_add_pd(_mm256_mul_pd(L, lp3), three);
    const __m256d den = _mm256_mul_pd(two, lp1);
    const __m256d c = _mm256_div_pd(lp3, lp1);
    const __m256d bm1 = _mm256_sub_pd(b, one);
    const __m256d bp1 = _mm256_add_pd(b, one);
    const __m256d hb = _mm256_mul_pd(half, b);
    const __m256d lp3_bm1 = _mm256_mul_pd(lp3, bm1);
    const __m256d e[16] = {
        c,
        _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(b, _mm256_mul_pd(bm1, q)), one), den),
        _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(bp1, q), b), one), den),
        _mm256_div_pd(one, lp1),
        c,
        _mm256_sub_pd(_mm256_sub_pd(half, hb), _mm256_mul_pd(half, lp3_bm1)),
        _mm256_add_pd(_mm256_mul_pd(b, _mm256_add_pd(L, one_half)), one_half),
        _mm256_sub_pd(half, hb),
        c,
        _mm256_sub_pd(one_half, hb),
        _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(two_half, b), _mm256_mul_pd(half, lp3_bm1)),
                      half),
        _mm256_add_pd(hb, half),
        c,
        _mm256_mul_pd(neg_half, lp3_bm1),
        _mm256_mul_pd(half, _mm256_mul_pd(lp3, bp1)),
        zero,
    };
    for (std::size_t e_idx = 0; e_idx < 16; ++e_idx) _mm256_storeu_pd(out + e_idx * m + k, e[e_idx]);
  }
  scalar::chicken_gamma(b_in, L_in, out, m, full);
}

}  // namespace normdyn::kernels::avx2
