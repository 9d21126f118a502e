#include <vector>

#include "normdyn/kernels.hpp"

namespace normdyn::kernels::scalar {

// Processes states [begin, m). The AVX2 variant calls this for its tail.
void replicator_flow(const double* gamma, std::size_t n, const double* x, double* out,
                     std::size_t m, std::size_t begin) {
  std::vector<double> f(n);
  for (std::size_t k = begin; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc = acc + gamma[i * n + j] * x[j * m + k];
      f[i] = acc;
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean = mean + x[i * m + k] * f[i];
    for (std::size_t i = 0; i < n; ++i) out[i * m + k] = x[i * m + k] * (f[i] - mean);
  }
}

void chicken_gamma(const double* b_in, const double* L_in, double* out, std::size_t m,
                   std::size_t begin) {
  for (std::size_t k = begin; k < m; ++k) {
    const double b = b_in[k];
    const double L = L_in[k];
    const double lp1 = L + 1.0;
    const double lp3 = L + 3.0;
    const double q = L * lp3 + 3.0;
    const double den = 2.0 * lp1;
    const double c = lp3 / lp1;
    const double bm1 = b - 1.0;
    const double bp1 = b + 1.0;
    const double hb = 0.5 * b;
    const double e[16] = {
        c,
        (b - bm1 * q + 1.0) / den,
        (bp1 * q - b + 1.0) / den,
        1.0 / lp1,
        c,
        0.5 - hb - 0.5 * (lp3 * bm1),
        b * (L + 1.5) + 1.5,
        0.5 - hb,
        c,
        1.5 - hb,
        2.5 * b - 0.5 * (lp3 * bm1) + 0.5,
        hb + 0.5,
        c,
        -0.5 * (lp3 * bm1),
        0.5 * (lp3 * bp1),
        0.0,
    };
    for (std::size_t e_idx = 0; e_idx < 16; ++e_idx) out[e_idx * m + k] = e[e_idx];
  }
}

}  // namespace normdyn::kernels::scalar
