#include "biofilm/linsolve.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "biofilm/kernels.hpp"

namespace biofilm {

void SolverConfig::validate() const {
  if (!(rtol > 0.0)) throw ContractError("solver rtol must be positive");
  if (!(atol > 0.0)) throw ContractError("solver atol must be positive");
  if (restart < 1) throw ContractError("solver restart must be at least 1");
  if (max_iterations < 0) throw ContractError("solver max_iterations must be non-negative");
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

StepError::StepError(const std::string& system, const SolveReport& report)
    : Error(system + " solve did not converge: residual " + sci(report.residual) + " > target " +
            sci(report.target) + " after " + std::to_string(report.iterations) + " iterations"),
      system_(system),
      report_(report) {}

double dot(const Field& a, const Field& b) { return global_sum(a, &b); }

double norm2(const Field& a) { return std::sqrt(dot(a, a)); }

namespace {

// y += alpha x over owned nodes
void axpy(double alpha, const Field& x, Field& y) {
  const auto& k = kernels::active();
  for (int j = 0; j < y.nj(); ++j) k.axpy(alpha, x.row(j), y.row(j), y.ni());
}

void scale(double alpha, Field& x) {
  for (int j = 0; j < x.nj(); ++j) {
    double* r = x.row(j);
    for (int i = 0; i < x.ni(); ++i) r[i] *= alpha;
  }
}

void subtract_class_means(Field& b, bool by_parity) {
  const GridSpec& g = b.layout().grid();
  const bool x_parity = by_parity && g.unique_nx() % 2 == 0;
  auto cls = [&](int i, int j) {
    if (!by_parity) return 0;
    return (x_parity ? b.gi(i) % 2 : 0) + 2 * (b.gj(j) % 2);
  };
  std::array<double, 4> counts{};
  for (int j = 0; j < b.nj(); ++j)
    for (int i = 0; i < b.ni(); ++i) counts[cls(i, j)] += 1.0;
  Comm& comm = b.layout().comm();
  std::array<double, 4> mean{};
  Field part = b.like();
  for (int c = 0; c < 4; ++c) {
    const double n = comm.sum(counts[c]);
    if (n == 0.0) continue;
    for (int j = 0; j < b.nj(); ++j)
      for (int i = 0; i < b.ni(); ++i) part(i, j) = cls(i, j) == c ? b(i, j) : 0.0;
    mean[c] = global_sum(part) / n;
  }
  for (int j = 0; j < b.nj(); ++j)
    for (int i = 0; i < b.ni(); ++i) b(i, j) -= mean[cls(i, j)];
}

std::vector<double> inverse_diagonal(const StencilMatrix& a) {
  const Subdomain& s = a.layout().sub();
  std::vector<double> inv(static_cast<std::size_t>(s.ni()) * s.nj());
  bool zero = false;
  for (int j = 0; j < s.nj(); ++j) {
    for (int i = 0; i < s.ni(); ++i) {
      double d = a.diagonal(i, j);
      zero |= d == 0.0;
      inv[static_cast<std::size_t>(j) * s.ni() + i] = d == 0.0 ? 0.0 : 1.0 / d;
    }
  }
  if (a.layout().comm().any(zero)) throw PreconditionerError("Jacobi: zero diagonal entry");
  return inv;
}

void apply_inverse_diagonal(const std::vector<double>& inv, const Field& r, Field& z) {
  const auto& k = kernels::active();
  const std::size_t ni = static_cast<std::size_t>(r.ni());
  for (int j = 0; j < r.nj(); ++j) k.mul(inv.data() + j * ni, r.row(j), z.row(j), ni);
}

}  // namespace

void nullspace_project(Field& b, Nullspace kind) {
  switch (kind) {
    case Nullspace::None:
      return;
    case Nullspace::Constants:
      subtract_class_means(b, false);
      return;
    case Nullspace::ParityConstants:
      subtract_class_means(b, true);
      return;
  }
}

Field nullspace_project(const Field& b) {
  Field out = b;
  nullspace_project(out, Nullspace::Constants);
  return out;
}

Field jacobi_apply(const StencilMatrix& a, const Field& r) {
  auto inv = inverse_diagonal(a);
  Field z = r.like();
  apply_inverse_diagonal(inv, r, z);
  return z;
}

SolveReport gmres_solve(const StencilMatrix& a, const Field& b_in, Field& x_out,
                        const SolverConfig& cfg) {
  cfg.validate();
  const LayoutPtr& layout = a.layout_ptr();
  const int width = std::max(1, a.radius());
  auto vec = [&] { return Field(layout, width, GhostPolicy::none(), GhostPolicy::none()); };

  const bool jacobi = cfg.preconditioner == Preconditioner::Jacobi;
  std::vector<double> inv_diag;
  if (jacobi) inv_diag = inverse_diagonal(a);
  auto precondition = [&](const Field& r, Field& z) {
    if (jacobi) {
      apply_inverse_diagonal(inv_diag, r, z);
    } else {
      z.copy_owned(r);
    }
  };

  Field b = vec();
  b.copy_owned(b_in);
  nullspace_project(b, cfg.nullspace);
  Field x = vec();
  x.copy_owned(x_out);

  SolveReport report;
  const double bnorm = norm2(b);
  report.target = std::max(cfg.rtol * bnorm, cfg.atol);
  if (bnorm == 0.0) {
    x_out.fill(0.0);
    report.converged = true;
    return report;
  }
  nullspace_project(x, cfg.nullspace);

  Field r = vec(), w = vec(), z = vec();
  auto true_residual = [&] {
    matvec(a, x, w);
    r.copy_owned(b);
    axpy(-1.0, w, r);
    return norm2(r);
  };

  const int m = cfg.restart;
  std::vector<Field> basis;
  basis.reserve(m + 1);
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);

  double rnorm = true_residual();
  int total = 0;
  while (true) {
    if (rnorm <= report.target) {
      report.converged = true;
      break;
    }
    if (total >= cfg.max_iterations) break;

    precondition(r, z);
    const double beta = norm2(z);
    if (!(beta > 0.0) || !std::isfinite(beta)) break;
    // Stop the inner iteration when the preconditioned residual has dropped
    // by the factor the true residual still needs.
    const double inner_target = beta * (report.target / rnorm);

    basis.clear();
    basis.push_back(vec());
    basis[0].copy_owned(z);
    scale(1.0 / beta, basis[0]);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int used = 0;
    for (int k = 0; k < m && total < cfg.max_iterations; ++k) {
      matvec(a, basis[k], w);
      precondition(w, z);
      ++total;
      const double znorm0 = norm2(z);
      // |z_n v_n| <= |z| |v| and the basis is unit-norm; z only shrinks
      // below. The factor 2 covers rounding in both.
      for (int i = 0; i <= k; ++i) {
        h[i][k] = global_sum_bounded(z, &basis[i], 2.0 * znorm0);
        axpy(-h[i][k], basis[i], z);
      }
      const double hnext = norm2(z);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
        h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
        h[i][k] = t;
      }
      const double denom = std::hypot(h[k][k], hnext);
      cs[k] = denom > 0.0 ? h[k][k] / denom : 1.0;
      sn[k] = denom > 0.0 ? hnext / denom : 0.0;
      h[k][k] = denom;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      used = k + 1;

      const bool breakdown = !(hnext > 1e-14 * znorm0);
      if (breakdown || std::fabs(g[k + 1]) <= inner_target) break;
      basis.push_back(vec());
      basis[k + 1].copy_owned(z);
      scale(1.0 / hnext, basis[k + 1]);
    }

    // Back substitution on the rotated Hessenberg system.
    for (int i = used - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < used; ++j) s -= h[i][j] * y[j];
      y[i] = h[i][i] != 0.0 ? s / h[i][i] : 0.0;
    }
    for (int i = 0; i < used; ++i) axpy(y[i], basis[i], x);
    nullspace_project(x, cfg.nullspace);

    const double previous = rnorm;
    rnorm = true_residual();
    if (!std::isfinite(rnorm)) break;
    // A full cycle that gains nothing will not gain on the next one either.
    if (rnorm > report.target && rnorm >= previous * (1.0 - 1e-12)) break;
  }

  report.iterations = total;
  report.residual = rnorm;
  x_out.copy_owned(x);
  return report;
}

}  // namespace biofilm
