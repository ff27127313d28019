#include <cmath>

#include "biofilm/kernels.hpp"

namespace biofilm::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i]));
  return m;
}

double max_abs_prod(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] * b[i]));
  return m;
}

void fold(const double* a, const double* b, std::size_t n, const double* sigma, int folds, double* acc) {
  for (std::size_t i = 0; i < n; ++i) {
    double t = b ? a[i] * b[i] : a[i];
    for (int f = 0; f < folds; ++f) {
      const double q = (sigma[f] + t) - sigma[f];
      acc[f] += q;
      t -= q;
    }
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil_row(double* out, const double* const* coef, const double* const* x,
                 std::size_t terms, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < terms; ++k) acc += coef[k][i] * x[k][i];
    out[i] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, "scalar", dot,  sum, max_abs,    max_abs_prod,
                                 fold,        axpy,     xpby, mul, stencil_row};
  return table;
}

}  // namespace biofilm::kernels
