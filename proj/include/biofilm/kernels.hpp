#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop kernels used by the Krylov layer. Every kernel has a portable
// scalar reference implementation; SIMD variants are selected once at runtime
// from what the CPU supports (override with BIOFILM_KERNELS=scalar|avx2).
//
// Element-wise kernels (axpy, xpby, mul, stencil_row) and fold must match the
// scalar reference bit-for-bit. The plain reductions (dot, sum) may
// reassociate and only agree to round-off.
namespace biofilm::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  // max |a[i] * b[i]|
  double (*max_abs_prod)(const double* a, const double* b, std::size_t n);
  // Pre-rounded accumulation of t = a[i] * b[i] (a[i] when b is null): for
  // each fold f, q = (sigma[f] + t) - sigma[f], acc[f] += q, t -= q. With
  // sigma chosen from a bound on |t| and the term count, every acc[f] is an
  // exact sum, so it does not depend on order or vector width.
  void (*fold)(const double* a, const double* b, std::size_t n, const double* sigma, int folds,
               double* acc);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + beta * y
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  // out = a * b
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = sum_k coef[k][i] * x[k][i], accumulated in k order from zero
  void (*stencil_row)(double* out, const double* const* coef, const double* const* x,
                      std::size_t terms, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);

/// The table in use. Resolved on first call.
const KernelTable& active();

/// Force a variant (tests, benchmarks). Throws ContractError if unavailable.
void select(Isa isa);

}  // namespace biofilm::kernels
