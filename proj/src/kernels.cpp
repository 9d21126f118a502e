#include "normdyn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "normdyn/errors.hpp"

namespace normdyn::kernels {

namespace {

// -1: no override; otherwise static_cast<int>(Isa).
std::atomic<int> g_override{-1};

bool env_forces_scalar() {
  const char* v = std::getenv("NORMDYN_FORCE_SCALAR");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
#if defined(NORMDYN_HAVE_AVX2)
  static const bool has_avx2 = __builtin_cpu_supports("avx2") != 0;
  if (has_avx2) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  static const bool forced = env_forces_scalar();
  return forced ? Isa::Scalar : detected_isa();
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) {
    throw DomainError("set_isa_override: AVX2 is not available on this build/CPU");
  }
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void replicator_flow_batch(std::span<const double> gamma, std::size_t n,
                           std::span<const double> x, std::span<double> out, std::size_t m,
                           Isa isa) {
  if (gamma.size() != n * n) throw ShapeError("replicator_flow_batch: gamma is not n x n");
  if (x.size() != n * m || out.size() != n * m) {
    throw ShapeError("replicator_flow_batch: state buffers are not n x m");
  }
#if defined(NORMDYN_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    avx2::replicator_flow(gamma.data(), n, x.data(), out.data(), m);
    return;
  }
#endif
  (void)isa;
  scalar::replicator_flow(gamma.data(), n, x.data(), out.data(), m, 0);
}

void chicken_gamma_batch(std::span<const double> b, std::span<const double> L,
                         std::span<double> out, Isa isa) {
  const std::size_t m = b.size();
  if (L.size() != m || out.size() != 16 * m) {
    throw ShapeError("chicken_gamma_batch: buffer sizes do not match");
  }
#if defined(NORMDYN_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    avx2::chicken_gamma(b.data(), L.data(), out.data(), m);
    return;
  }
#endif
  (void)isa;
  scalar::chicken_gamma(b.data(), L.data(), out.data(), m, 0);
}

}  // namespace normdyn::kernels
