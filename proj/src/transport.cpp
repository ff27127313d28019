#include "biofilm/transport.hpp"

#include <algorithm>

#include "biofilm/errors.hpp"
#include "biofilm/stencil.hpp"

namespace biofilm {

void ChParams::validate() const {
  if (!(gamma1 > 0.0)) throw ConfigError("ch.gamma1 must be positive");
  if (!(gamma2 > 0.0)) throw ConfigError("ch.gamma2 must be positive");
  if (!(lambda > 0.0)) throw ConfigError("ch.lambda must be positive");
  if (!(kc > 0.0)) throw ConfigError("ch.kc must be positive");
  if (!(mu >= 0.0)) throw ConfigError("ch.mu must be non-negative");
  if (!(epsilon >= 0.0)) throw ConfigError("ch.epsilon must be non-negative");
  if (!(stabilization >= 0.0)) throw ConfigError("ch.stabilization must be non-negative");
}

void NutrientParams::validate() const {
  if (!(ds > 0.0)) throw ConfigError("nutrient.ds must be positive");
  if (!(a >= 0.0)) throw ConfigError("nutrient.a must be non-negative");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("nutrient.theta must lie in [0.5, 1]");
}

Field History::extrapolated() const {
  Field out = curr.like();
  for (int j = 0; j < out.nj(); ++j)
    for (int i = 0; i < out.ni(); ++i) out(i, j) = 1.5 * curr(i, j) - 0.5 * prev(i, j);
  update_ghosts(out);
  return out;
}

void History::advance(const Field& next) {
  std::swap(prev, curr);
  curr.copy_owned(next);
  update_ghosts(curr);
}

double bulk_potential_derivative(double phi, double gamma2) {
  return 2.0 * gamma2 * phi * (1.0 - phi) * (1.0 - 2.0 * phi);
}

Field chemical_potential(const Field& phi, const ChParams& p) {
  Field out = laplacian(phi);
  for (int j = 0; j < out.nj(); ++j)
    for (int i = 0; i < out.ni(); ++i)
      out(i, j) = -p.gamma1 * out(i, j) + bulk_potential_derivative(phi(i, j), p.gamma2);
  return out;
}

namespace {

// Copy with ghosts current, so callers may hand in fields whose ghosts are stale.
Field fresh(const Field& f, int ghost) {
  Field out(f.layout_ptr(), std::max(ghost, f.ghost()), f.bottom_policy(), f.top_policy());
  out.copy_owned(f);
  update_ghosts(out);
  return out;
}

VectorField fresh(const VectorField& v) { return {fresh(v.u, 1), fresh(v.v, 1)}; }

double face_mobility(double lambda, double a, double b) { return lambda * std::max(0.0, 0.5 * (a + b)); }

struct Face {
  int di, dj;
  double inv_h2;
};

// Faces of node (i, j) that carry flux; the outer face of a wall node does not.
int active_faces(const Field& f, int j, double rx, double ry, Face out[4]) {
  const Subdomain& s = f.layout().sub();
  int n = 0;
  out[n++] = {1, 0, rx};
  out[n++] = {-1, 0, rx};
  if (!(s.top_wall() && j == f.nj() - 1)) out[n++] = {0, 1, ry};
  if (!(s.bottom_wall() && j == 0)) out[n++] = {0, -1, ry};
  return n;
}

// div(M grad g) with M = lambda max(0, phi*) on faces and no wall flux.
Field mobility_div(const Field& phis, double lambda, const Field& g) {
  const GridSpec& grid = g.layout().grid();
  const double rx = 1.0 / (grid.dx * grid.dx), ry = 1.0 / (grid.dy * grid.dy);
  Field out(g.layout_ptr(), 1);
  Face faces[4];
  for (int j = 0; j < g.nj(); ++j) {
    const int nf = active_faces(g, j, rx, ry, faces);
    for (int i = 0; i < g.ni(); ++i) {
      double sum = 0.0;
      for (int k = 0; k < nf; ++k) {
        const Face& f = faces[k];
        const double m = face_mobility(lambda, phis(i, j), phis(i + f.di, j + f.dj));
        sum += m * (g(i + f.di, j + f.dj) - g(i, j)) * f.inv_h2;
      }
      out(i, j) = sum;
    }
  }
  return out;
}

StencilRow laplacian_row(int gj, int ny, double rx, double ry) {
  StencilRow r(gj, ny);
  r.add(0, 0, -2.0 * (rx + ry));
  r.add(1, 0, rx);
  r.add(-1, 0, rx);
  r.add(0, 1, ry);
  r.add(0, -1, ry);
  return r;
}

// Adds scale * div(f w) to the row, f being the unknown and w a carrier
// velocity (ghosts current). Wall ghosts of f fold by mirror.
void add_advection(StencilRow& row, const VectorField& w, int i, int j, double rx, double ry,
                   double scale) {
  row.add(1, 0, scale * w.u(i + 1, j) * rx);
  row.add(-1, 0, -scale * w.u(i - 1, j) * rx);
  row.add(0, 1, scale * w.v(i, j + 1) * ry);
  row.add(0, -1, -scale * w.v(i, j - 1) * ry);
}

bool any_nonpositive(const Field& f) {
  bool bad = false;
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) bad |= !(f(i, j) > 0.0);
  return f.layout().comm().any(bad);
}

Field solver_guess(const Field& f) {
  Field x(f.layout_ptr(), 2, GhostPolicy::none(), GhostPolicy::none());
  x.copy_owned(f);
  return x;
}

// Exact solve on the constant mode: shifts x by a constant so the residual
// sums to zero. The rows are in flux form, so sum(A x) = sum(b) is the
// discrete mass balance, which GMRES alone meets only to its tolerance.
void conserve_total(const StencilMatrix& a, const Field& b, Field& x) {
  Field ax = x.like(), one = x.like(), a1 = x.like();
  matvec(a, x, ax);
  one.fill(1.0);
  matvec(a, one, a1);
  const double denom = global_reduce(a1, Reduce::Sum);
  if (denom == 0.0) return;
  const double shift = (global_reduce(b, Reduce::Sum) - global_reduce(ax, Reduce::Sum)) / denom;
  for (int j = 0; j < x.nj(); ++j)
    for (int i = 0; i < x.ni(); ++i) x(i, j) += shift;
}

}  // namespace

double free_energy(const Field& phi_in, const ChParams& p) {
  Field phi(phi_in.layout_ptr(), 1);
  phi.copy_owned(phi_in);
  update_ghosts(phi);
  const GridSpec& g = phi.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  Field density = phi.like(0);
  for (int j = 0; j < phi.nj(); ++j) {
    for (int i = 0; i < phi.ni(); ++i) {
      const double px = (phi(i + 1, j) - phi(i - 1, j)) * rx;
      const double py = (phi(i, j + 1) - phi(i, j - 1)) * ry;
      const double f = phi(i, j) * (1.0 - phi(i, j));
      density(i, j) = 0.5 * p.gamma1 * (px * px + py * py) + p.gamma2 * f * f;
    }
  }
  return g.dx * g.dy * global_reduce(density, Reduce::Sum);
}

Field growth_rate(const Field& phi, const Field& c, const ChParams& p) {
  Field out(phi.layout_ptr(), 1);
  bool bad = false;
  for (int j = 0; j < out.nj(); ++j) {
    for (int i = 0; i < out.ni(); ++i) {
      const double denom = p.kc + c(i, j);
      bad |= !(denom > 0.0);
      out(i, j) = p.epsilon * p.mu * phi(i, j) * c(i, j) / denom;
    }
  }
  if (phi.layout().comm().any(bad)) throw DomainError("growth_rate: kc + c <= 0");
  return out;
}

StepResult ch_step(const PhiHistory& hist, const VectorField& vel_in, const Field& c,
                   const ChParams& p, double dt, const SolverConfig& solver) {
  const LayoutPtr& layout = hist.curr.layout_ptr();
  const GridSpec& grid = layout->grid();
  const double rx = 1.0 / (grid.dx * grid.dx), ry = 1.0 / (grid.dy * grid.dy);
  const Field phi = fresh(hist.curr, 2);
  const Field phis = hist.extrapolated();
  const VectorField vel = fresh(vel_in);

  Field lap = laplacian(phi);
  update_ghosts(lap);
  Field bulk = phis.like(1);
  for (int j = 0; j < bulk.nj(); ++j)
    for (int i = 0; i < bulk.ni(); ++i) bulk(i, j) = bulk_potential_derivative(phis(i, j), p.gamma2);
  update_ghosts(bulk);

  const Field implicit_old = mobility_div(phis, p.lambda, lap);
  const Field explicit_bulk = mobility_div(phis, p.lambda, bulk);
  const double stab = 2.0 * p.gamma2 * p.stabilization;
  Field stab_old = phi.like(0);
  if (stab > 0.0) stab_old = mobility_div(phis, p.lambda, phi);
  const bool implicit_adv = p.advection == Advection::CrankNicolson;
  Field adv = advect(implicit_adv ? phi : phis, vel);
  if (implicit_adv)
    for (int j = 0; j < adv.nj(); ++j)
      for (int i = 0; i < adv.ni(); ++i) adv(i, j) *= 0.5;
  const Field prod = growth_rate(phis, c, p);

  Field rhs(layout, 0);
  const double half = 0.5 * p.gamma1;
  for (int j = 0; j < rhs.nj(); ++j)
    for (int i = 0; i < rhs.ni(); ++i)
      rhs(i, j) = phi(i, j) / dt - half * implicit_old(i, j) + explicit_bulk(i, j) - adv(i, j) +
                  prod(i, j) - stab * stab_old(i, j);

  const int ny = grid.ny;
  Face faces[4];
  StencilMatrix a = assemble(layout, 2, [&](int i, int j, std::vector<StencilEntry>& out) {
    const int gj = phi.gj(j);
    StencilRow row(gj, ny);
    row.add(0, 0, 1.0 / dt);
    const StencilRow centre = laplacian_row(gj, ny, rx, ry);
    if (implicit_adv) add_advection(row, vel, i, j, 0.5 / grid.dx, 0.5 / grid.dy, 0.5);
    const int nf = active_faces(phi, j, rx, ry, faces);
    for (int k = 0; k < nf; ++k) {
      const Face& f = faces[k];
      const double m = face_mobility(p.lambda, phis(i, j), phis(i + f.di, j + f.dj)) * f.inv_h2;
      const double w = half * m;
      if (w == 0.0) continue;
      if (stab > 0.0) {
        row.add(f.di, f.dj, -stab * m);
        row.add(0, 0, stab * m);
      }
      row.add_row(laplacian_row(gj + f.dj, ny, rx, ry), f.di, f.dj, w);
      row.add_row(centre, 0, 0, -w);
    }
    out.assign(row.entries().begin(), row.entries().end());
  });

  Field x = solver_guess(phi);
  SolveReport report = gmres_solve(a, rhs, x, solver);
  if (!report.converged) throw StepError("cahn-hilliard", report);
  conserve_total(a, rhs, x);
  Field next = phi.like();
  next.copy_owned(x);
  update_ghosts(next);
  return {std::move(next), report};
}

StepResult nutrient_step(const History& c, const PhiHistory& phi, const Field& phi_next_in,
                         const VectorField& vel_in, const NutrientParams& p, double dt,
                         const SolverConfig& solver) {
  const LayoutPtr& layout = c.curr.layout_ptr();
  const GridSpec& grid = layout->grid();
  const double rx = 1.0 / (grid.dx * grid.dx), ry = 1.0 / (grid.dy * grid.dy);
  const Field cn = fresh(c.curr, 1);
  const Field cs = c.extrapolated();
  const Field& phin = phi.curr;
  const VectorField vel = fresh(vel_in);

  Field solvent_next(layout, 1), solvent_half(layout, 1), network_half(layout, 1);
  for (int j = 0; j < cn.nj(); ++j) {
    for (int i = 0; i < cn.ni(); ++i) {
      const double half = 0.5 * (phin(i, j) + phi_next_in(i, j));
      solvent_next(i, j) = 1.0 - phi_next_in(i, j);
      solvent_half(i, j) = 1.0 - half;
      network_half(i, j) = half;
    }
  }
  if (any_nonpositive(solvent_next) || any_nonpositive(solvent_half)) {
    throw DomainError("nutrient_step: solvent fraction phi_s <= 0");
  }

  const bool implicit_adv = p.advection == Advection::CrankNicolson;
  Field diff = solvent_half.like();
  Field flux = solvent_half.like();
  VectorField carrier{vel.u.like(), vel.v.like()};
  for (int j = 0; j < cn.nj(); ++j) {
    for (int i = 0; i < cn.ni(); ++i) {
      diff(i, j) = p.ds * solvent_half(i, j);
      flux(i, j) = (implicit_adv ? cn(i, j) : cs(i, j)) * solvent_half(i, j);
    }
  }
  update_ghosts(diff);
  update_ghosts(flux);
  Field solvent_ghosted = solvent_half;
  update_ghosts(solvent_ghosted);
  for (int j = -1; j <= cn.nj(); ++j) {
    for (int i = -1; i <= cn.ni(); ++i) {
      carrier.u(i, j) = solvent_ghosted(i, j) * vel.u(i, j);
      carrier.v(i, j) = solvent_ghosted(i, j) * vel.v(i, j);
    }
  }

  const Field diffusion_old = div_coeff_grad(diff, cn, WallFlux::Zero);
  Field adv = advect(flux, vel);
  if (implicit_adv)
    for (int j = 0; j < adv.nj(); ++j)
      for (int i = 0; i < adv.ni(); ++i) adv(i, j) *= 0.5;

  Field rhs(layout, 0);
  for (int j = 0; j < rhs.nj(); ++j) {
    for (int i = 0; i < rhs.ni(); ++i) {
      rhs(i, j) = (1.0 - phin(i, j)) * cn(i, j) / dt - adv(i, j) + (1.0 - p.theta) * diffusion_old(i, j);
    }
  }

  Face faces[4];
  StencilMatrix a = assemble(layout, 1, [&](int i, int j, std::vector<StencilEntry>& out) {
    StencilRow row(cn.gj(j), grid.ny);
    double centre = solvent_next(i, j) / dt + p.a * network_half(i, j);
    const int nf = active_faces(cn, j, rx, ry, faces);
    for (int k = 0; k < nf; ++k) {
      const Face& f = faces[k];
      const double w = p.theta * 0.5 * (diff(i, j) + diff(i + f.di, j + f.dj)) * f.inv_h2;
      row.add(f.di, f.dj, -w);
      centre += w;
    }
    row.add(0, 0, centre);
    if (implicit_adv) add_advection(row, carrier, i, j, 0.5 / grid.dx, 0.5 / grid.dy, 0.5);
    out.assign(row.entries().begin(), row.entries().end());
  });

  Field x = solver_guess(cn);
  SolveReport report = gmres_solve(a, rhs, x, solver);
  if (!report.converged) throw StepError("nutrient", report);
  Field next = cn.like();
  next.copy_owned(x);
  update_ghosts(next);
  return {std::move(next), report};
}

}  // namespace biofilm
