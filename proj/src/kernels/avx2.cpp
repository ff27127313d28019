#include <immintrin.h>

#include <cmath>

#include "biofilm/kernels.hpp"

// Compiled with -mavx2 only (no FMA) so element-wise results round exactly
// like the scalar reference.
namespace biofilm::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
  return r;
}

double max_abs_prod(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, t));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] * b[i]));
  return r;
}

// Fold count as a template parameter keeps sigma and the accumulators in
// registers; two independent streams hide the add latency.
template <int F, bool Prod>
void fold_n(const double* a, const double* b, std::size_t n, const double* sigma, double* acc) {
  __m256d vs[F], va[F], vb[F];
  for (int f = 0; f < F; ++f) {
    vs[f] = _mm256_set1_pd(sigma[f]);
    va[f] = vb[f] = _mm256_setzero_pd();
  }
  auto load = [&](std::size_t i) {
    __m256d t = _mm256_loadu_pd(a + i);
    if constexpr (Prod) t = _mm256_mul_pd(t, _mm256_loadu_pd(b + i));
    return t;
  };
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d t = load(i), u = load(i + 4);
    for (int f = 0; f < F; ++f) {
      const __m256d q = _mm256_sub_pd(_mm256_add_pd(vs[f], t), vs[f]);
      const __m256d r = _mm256_sub_pd(_mm256_add_pd(vs[f], u), vs[f]);
      va[f] = _mm256_add_pd(va[f], q);
      vb[f] = _mm256_add_pd(vb[f], r);
      t = _mm256_sub_pd(t, q);
      u = _mm256_sub_pd(u, r);
    }
  }
  for (; i + 4 <= n; i += 4) {
    __m256d t = load(i);
    for (int f = 0; f < F; ++f) {
      const __m256d q = _mm256_sub_pd(_mm256_add_pd(vs[f], t), vs[f]);
      va[f] = _mm256_add_pd(va[f], q);
      t = _mm256_sub_pd(t, q);
    }
  }
  // exact partial sums: any combination order gives the same value
  for (int f = 0; f < F; ++f) acc[f] += hsum(_mm256_add_pd(va[f], vb[f]));
  for (; i < n; ++i) {
    double t = Prod ? a[i] * b[i] : a[i];
    for (int f = 0; f < F; ++f) {
      const double q = (sigma[f] + t) - sigma[f];
      acc[f] += q;
      t -= q;
    }
  }
}

template <int F>
void fold_f(const double* a, const double* b, std::size_t n, const double* sigma, double* acc) {
  if (b) fold_n<F, true>(a, b, n, sigma, acc);
  else fold_n<F, false>(a, b, n, sigma, acc);
}

void fold(const double* a, const double* b, std::size_t n, const double* sigma, int folds, double* acc) {
  switch (folds) {
    case 1: return fold_f<1>(a, b, n, sigma, acc);
    case 2: return fold_f<2>(a, b, n, sigma, acc);
    case 3: return fold_f<3>(a, b, n, sigma, acc);
    default:
      for (std::size_t i = 0; i < n; ++i) {
        double t = b ? a[i] * b[i] : a[i];
        for (int f = 0; f < folds; ++f) {
          const double q = (sigma[f] + t) - sigma[f];
          acc[f] += q;
          t -= q;
        }
      }
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil_row(double* out, const double* const* coef, const double* const* x,
                 std::size_t terms, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < terms; ++k) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(coef[k] + i),
                                             _mm256_loadu_pd(x[k] + i)));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < terms; ++k) acc += coef[k][i] * x[k][i];
    out[i] = acc;
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, "avx2", dot,  sum, max_abs,    max_abs_prod,
                                 fold,      axpy,   xpby, mul, stencil_row};
  return table;
}

}  // namespace biofilm::kernels
