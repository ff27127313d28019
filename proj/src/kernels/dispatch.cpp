#include <atomic>
#include <cstdlib>
#include <string>

#include "biofilm/errors.hpp"
#include "biofilm/kernels.hpp"

namespace biofilm::kernels {

#ifdef BIOFILM_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#ifdef BIOFILM_HAVE_AVX2
  return &avx2_kernels();
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(BIOFILM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable* table_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  return isa == Isa::Scalar ? &scalar_table() : avx2_table();
}

const KernelTable* resolve() {
  if (const char* env = std::getenv("BIOFILM_KERNELS")) {
    std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2") {
      if (const KernelTable* t = table_for(Isa::Avx2)) return t;
      return &scalar_table();
    }
  }
  if (const KernelTable* t = table_for(Isa::Avx2)) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*> current{nullptr};

}  // namespace

const KernelTable& active() {
  const KernelTable* t = current.load(std::memory_order_acquire);
  if (!t) {
    t = resolve();
    current.store(t, std::memory_order_release);
  }
  return *t;
}

void select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (!t) throw ContractError("kernel variant not available on this build/CPU");
  current.store(t, std::memory_order_release);
}

}  // namespace biofilm::kernels
