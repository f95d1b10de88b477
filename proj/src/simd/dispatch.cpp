#include <atomic>
#include <cstdlib>
#include <string>

#include "bess/simd/kernels.hpp"

namespace bess::simd {

#if !defined(BESS_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(BESS_HAVE_NEON)
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar_kernels();
    case Isa::Avx2: return avx2_kernels();
    case Isa::Neon: return neon_kernels();
  }
  return nullptr;
}

Isa detect() {
  if (const char* env = std::getenv("BESS_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && avx2_kernels()) return Isa::Avx2;
    if (v == "neon" && neon_kernels()) return Isa::Neon;
  }
  if (avx2_kernels()) return Isa::Avx2;
  if (neon_kernels()) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const KernelTable& kernels() { return *table_for(active_isa()); }

bool force_isa(Isa isa) {
  if (!table_for(isa)) return false;
  current().store(isa, std::memory_order_relaxed);
  return true;
}

}  // namespace bess::simd
