#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Both variants evaluate the same expressions in the same order without
// fused multiply-add, so their results are bit-identical; the AVX2 path only
// changes how many states/cells are processed per instruction. The variant is
// chosen at run time from CPU support; NORMDYN_FORCE_SCALAR=1 in the
// environment or set_isa_override() pins the scalar path.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace normdyn::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

// Best variant compiled in and supported by this CPU.
Isa detected_isa();
// detected_isa() unless overridden.
Isa active_isa();
void set_isa_override(std::optional<Isa> isa);

// Replicator flow for m states of dimension n stored structure-of-arrays:
// component i of state k lives at x[i*m + k]. `gamma` is n x n row-major.
// out[i*m + k] = x_ik ((Γ x_k)_i - x_kᵀ Γ x_k).
void replicator_flow_batch(std::span<const double> gamma, std::size_t n,
                           std::span<const double> x, std::span<double> out, std::size_t m,
                           Isa isa = active_isa());

// Closed-form chicken Γ (B = 3, g = 0) for m (b, L) cells. Entry (r, c) of
// cell k is written to out[(4r + c)*m + k].
void chicken_gamma_batch(std::span<const double> b, std::span<const double> L,
                         std::span<double> out, Isa isa = active_isa());

namespace scalar {
void replicator_flow(const double* gamma, std::size_t n, const double* x, double* out,
                     std::size_t m, std::size_t begin);
void chicken_gamma(const double* b, const double* L, double* out, std::size_t m,
                   std::size_t begin);
}  // namespace scalar

#if defined(NORMDYN_HAVE_AVX2)
namespace avx2 {
void replicator_flow(const double* gamma, std::size_t n, const double* x, double* out,
                     std::size_t m);
void chicken_gamma(const double* b, const double* L, double* out, std::size_t m);
}  // namespace avx2
#endif

}  // namespace normdyn::kernels
