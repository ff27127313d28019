#include "biofilm/flow.hpp"

#include <algorithm>
#include <cmath>

#include "biofilm/errors.hpp"

namespace biofilm {

void FlowParams::validate() const {
  if (!(re_s > 0.0)) throw ConfigError("flow.re_s must be positive");
  if (!(re_n > 0.0)) throw ConfigError("flow.re_n must be positive");
  if (!(rho_n_ratio > 0.0)) throw ConfigError("flow.rho_n_ratio must be positive");
  if (!(rho_s_ratio > 0.0)) throw ConfigError("flow.rho_s_ratio must be positive");
  if (!std::isfinite(lid_u) || !std::isfinite(lid_v)) throw ConfigError("flow.lid_u/lid_v must be finite");
  if (!(viscous_theta >= 0.5 && viscous_theta <= 1.0)) throw ConfigError("flow.viscous_theta must lie in [0.5, 1]");
}

VectorField make_velocity(const LayoutPtr& layout, const FlowParams& fp) {
  VectorField v{Field(layout, 1, GhostPolicy::dirichlet(0.0), GhostPolicy::dirichlet(fp.lid_u)),
                Field(layout, 1, GhostPolicy::dirichlet(0.0), GhostPolicy::dirichlet(fp.lid_v))};
  update_ghosts(v.u);
  update_ghosts(v.v);
  return v;
}

FlowState FlowState::quiescent(const LayoutPtr& layout, const FlowParams& fp) {
  FlowState s;
  s.v = make_velocity(layout, fp);
  s.v_prev = s.v;
  s.u_star = s.v;
  s.p = Field(layout, 1);
  return s;
}

namespace {

Field nodewise(const Field& phi, double (*fn)(double, const FlowParams&), const FlowParams& fp) {
  Field out(phi.layout_ptr(), 1);
  for (int j = 0; j < out.nj(); ++j)
    for (int i = 0; i < out.ni(); ++i) out(i, j) = fn(phi(i, j), fp);
  update_ghosts(out);
  return out;
}

double density_at(double phi, const FlowParams& fp) {
  return (1.0 - phi) * fp.rho_s_ratio + phi * fp.rho_n_ratio;
}

double inverse_re_at(double phi, const FlowParams& fp) { return phi / fp.re_n + (1.0 - phi) / fp.re_s; }

VectorField fresh(const VectorField& v) {
  VectorField out = v;
  update_ghosts(out.u);
  update_ghosts(out.v);
  return out;
}

VectorField extrapolate(const VectorField& prev, const VectorField& curr) {
  VectorField out = curr;
  for (int j = 0; j < out.u.nj(); ++j) {
    for (int i = 0; i < out.u.ni(); ++i) {
      out.u(i, j) = 1.5 * curr.u(i, j) - 0.5 * prev.u(i, j);
      out.v(i, j) = 1.5 * curr.v(i, j) - 0.5 * prev.v(i, j);
    }
  }
  update_ghosts(out.u);
  update_ghosts(out.v);
  return out;
}

bool is_wall_row(const Field& f, int j) {
  const Subdomain& s = f.layout().sub();
  return (s.bottom_wall() && j == 0) || (s.top_wall() && j == f.nj() - 1);
}

// Value the Dirichlet policy pins on local wall row j.
double wall_value(const Field& f, int j) {
  return j == 0 && f.layout().sub().bottom_wall() ? f.bottom_policy().value : f.top_policy().value;
}

}  // namespace

Field averaged_density(const Field& phi, const FlowParams& fp) { return nodewise(phi, density_at, fp); }

Field averaged_inverse_reynolds(const Field& phi, const FlowParams& fp) {
  return nodewise(phi, inverse_re_at, fp);
}

VectorField assemble_R(const Field& phi, const VectorField& v, const FlowParams& fp, double re_a_ref) {
  VectorField r = phase_stress_div(phi, fp.gamma1);
  for (int j = 0; j < r.u.nj(); ++j) {
    for (int i = 0; i < r.u.ni(); ++i) {
      r.u(i, j) = -r.u(i, j);
      r.v(i, j) = -r.v(i, j);
    }
  }
  SymTensorField s = rate_of_strain(v);
  const double ref = 1.0 / re_a_ref;
  for (int j = 0; j < s.xx.nj(); ++j) {
    for (int i = 0; i < s.xx.ni(); ++i) {
      const double excess = 2.0 * (inverse_re_at(phi(i, j), fp) - ref);
      s.xx(i, j) *= excess;
      s.xy(i, j) *= excess;
      s.yy(i, j) *= excess;
    }
  }
  update_ghosts(s.xx);
  update_ghosts(s.xy);
  update_ghosts(s.yy);
  const VectorField visc = div_tensor(s);
  for (int j = 0; j < r.u.nj(); ++j) {
    for (int i = 0; i < r.u.ni(); ++i) {
      r.u(i, j) += visc.u(i, j);
      r.v(i, j) += visc.v(i, j);
    }
  }
  return r;
}

MomentumResult intermediate_velocity(const FlowState& state, const Field& phi_star,
                                     const VectorField& r, const FlowParams& fp, double dt,
                                     const SolverConfig& solver) {
  const LayoutPtr& layout = state.v.u.layout_ptr();
  const GridSpec& g = layout->grid();
  const double rx = 1.0 / (g.dx * g.dx), ry = 1.0 / (g.dy * g.dy);
  const VectorField vn = fresh(state.v);
  const VectorField vs = extrapolate(state.v_prev, state.v);
  const VectorField conv = convective_derivative(vs);
  const Field rho = averaged_density(phi_star, fp);
  const double re = fp.re_a_ref();
  auto nu = [&](int i, int j) { return 1.0 / (rho(i, j) * re); };

  const bool averaged = fp.viscosity == Viscosity::Averaged;
  const Field eta = averaged ? averaged_inverse_reynolds(phi_star, fp) : Field(layout, 1);
  const double theta = fp.viscous_theta;
  // Interior rows are divided by their diagonal: the viscous terms outweigh
  // 1/dt by up to twelve decades and an unscaled residual drowns in the
  // round-off of the stiff rows, next to unit wall rows.
  auto row_diag = [&](int i, int j) {
    if (!averaged) return 1.0 / dt + 2.0 * theta * nu(i, j) * (rx + ry);
    const double f = 0.5 * theta / rho(i, j);
    return 1.0 / dt + f * ((2.0 * eta(i, j) + eta(i - 1, j) + eta(i + 1, j)) * rx +
                           (2.0 * eta(i, j) + eta(i, j - 1) + eta(i, j + 1)) * ry);
  };

  StencilMatrix a = assemble(layout, 1, [&](int i, int j, std::vector<StencilEntry>& out) {
    if (is_wall_row(vn.u, j)) {
      out.push_back({0, 0, 1.0});
      return;
    }
    if (averaged) {
      // interior rows only, so every neighbour is a real node or an x ghost
      const double b = theta / rho(i, j);
      double w[4] = {b * 0.5 * (eta(i, j) + eta(i, j - 1)) * ry, b * 0.5 * (eta(i, j) + eta(i - 1, j)) * rx,
                     b * 0.5 * (eta(i, j) + eta(i + 1, j)) * rx, b * 0.5 * (eta(i, j) + eta(i, j + 1)) * ry};
      const double s = 1.0 / row_diag(i, j);
      for (double& x : w) x *= s;
      out.push_back({0, -1, -w[0]});
      out.push_back({-1, 0, -w[1]});
      out.push_back({0, 0, 1.0});
      out.push_back({1, 0, -w[2]});
      out.push_back({0, 1, -w[3]});
      return;
    }
    const double h = theta * nu(i, j) / row_diag(i, j);
    out.push_back({0, -1, -h * ry});
    out.push_back({-1, 0, -h * rx});
    out.push_back({0, 0, 1.0});
    out.push_back({1, 0, -h * rx});
    out.push_back({0, 1, -h * ry});
  });

  MomentumResult result{state.v, {}, {}};
  auto solve = [&](const Field& cur, const Field& nonlinear, const Field& force, Field& out,
                   SolveReport& report, const char* name) {
    const Field visc = averaged ? div_coeff_grad(eta, cur) : laplacian(cur);
    Field rhs(layout, 0);
    for (int j = 0; j < rhs.nj(); ++j) {
      const bool wall = is_wall_row(cur, j);
      const double pinned = wall ? wall_value(cur, j) : 0.0;
      for (int i = 0; i < rhs.ni(); ++i) {
        const double scale = averaged ? 1.0 / rho(i, j) : nu(i, j);
        rhs(i, j) = wall ? pinned
                         : (cur(i, j) / dt - nonlinear(i, j) + (1.0 - theta) * scale * visc(i, j) +
                            force(i, j) / rho(i, j)) /
                               row_diag(i, j);
      }
    }
    Field x(layout, 1, GhostPolicy::none(), GhostPolicy::none());
    x.copy_owned(cur);
    report = gmres_solve(a, rhs, x, solver);
    if (!report.converged) throw StepError(name, report);
    out.copy_owned(x);
    update_ghosts(out);
  };
  solve(vn.u, conv.u, r.u, result.u.u, result.report_u, "momentum-u");
  solve(vn.v, conv.v, r.v, result.u.v, result.report_v, "momentum-v");
  return result;
}

StepResult pressure_poisson(const VectorField& u_star_in, const Field& rho, const SolverConfig& solver_in,
                            const Field* guess) {
  const LayoutPtr& layout = rho.layout_ptr();
  const GridSpec& g = layout->grid();
  const int ny = g.ny;
  bool bad = false;
  for (int j = -1; j <= rho.nj(); ++j)
    for (int i = -1; i <= rho.ni(); ++i) bad |= !(rho(i, j) > 0.0);
  if (layout->comm().any(bad)) throw CoefficientError("pressure_poisson: density must be positive");

  const VectorField us = fresh(u_star_in);
  const double qx = 1.0 / (4.0 * g.dx * g.dx), qy = 1.0 / (4.0 * g.dy * g.dy);
  auto weight = [&](int j) { return is_wall_row(rho, j) ? 0.5 : 1.0; };

  StencilMatrix a = assemble(layout, 2, [&](int i, int j, std::vector<StencilEntry>& out) {
    const double w = weight(j);
    const double be = 1.0 / rho(i + 1, j), bw = 1.0 / rho(i - 1, j);
    const double bn = 1.0 / rho(i, j + 1), bs = 1.0 / rho(i, j - 1);
    StencilRow row(rho.gj(j), ny);
    row.add(0, 0, w * ((be + bw) * qx + (bn + bs) * qy));
    row.add(2, 0, -w * be * qx);
    row.add(-2, 0, -w * bw * qx);
    row.add(0, 2, -w * bn * qy);
    row.add(0, -2, -w * bs * qy);
    out.assign(row.entries().begin(), row.entries().end());
  });

  // Divergence of u*, with the normal component reflected oddly about its
  // wall value on wall rows: the same reflection the mirrored pressure gives
  // the normal flux.
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  const Subdomain& sub = layout->sub();
  Field rhs(layout, 0);
  for (int j = 0; j < rhs.nj(); ++j) {
    for (int i = 0; i < rhs.ni(); ++i) {
      const double dudx = (us.u(i + 1, j) - us.u(i - 1, j)) * rx;
      double dvdy;
      if (sub.bottom_wall() && j == 0) {
        dvdy = 2.0 * (us.v(i, 1) - us.v(i, 0)) * ry;
      } else if (sub.top_wall() && j == rhs.nj() - 1) {
        dvdy = 2.0 * (us.v(i, j) - us.v(i, j - 1)) * ry;
      } else {
        dvdy = (us.v(i, j + 1) - us.v(i, j - 1)) * ry;
      }
      rhs(i, j) = weight(j) * (dudx + dvdy);
    }
  }

  SolverConfig solver = solver_in;
  solver.nullspace = Nullspace::ParityConstants;
  Field x(layout, 2, GhostPolicy::none(), GhostPolicy::none());
  if (guess) x.copy_owned(*guess);
  SolveReport report = gmres_solve(a, rhs, x, solver);
  if (!report.converged) throw StepError("pressure", report);
  Field p(layout, 1);
  p.copy_owned(x);
  update_ghosts(p);
  return {std::move(p), report};
}

VectorField velocity_correction(const VectorField& u_star, const Field& p_in, const Field& rho) {
  Field p = p_in;
  update_ghosts(p);
  const GridSpec& g = p.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  VectorField v = u_star;
  for (int j = 0; j < v.u.nj(); ++j) {
    if (is_wall_row(v.u, j)) continue;
    for (int i = 0; i < v.u.ni(); ++i) {
      const double b = 1.0 / rho(i, j);
      v.u(i, j) = u_star.u(i, j) + b * (p(i + 1, j) - p(i - 1, j)) * rx;
      v.v(i, j) = u_star.v(i, j) + b * (p(i, j + 1) - p(i, j - 1)) * ry;
    }
  }
  update_ghosts(v.u);
  update_ghosts(v.v);
  return v;
}

FlowReport flow_step(FlowState& state, const PhiHistory& phi, const Field& phi_next,
                     const FlowParams& fp, double dt, const SolverConfig& momentum,
                     const SolverConfig& pressure) {
  const Field phis = phi.extrapolated();
  const LayoutPtr& layout = phis.layout_ptr();
  VectorField r{Field(layout, 1), Field(layout, 1)};
  if (fp.include_r && fp.viscosity == Viscosity::Averaged) {
    r = phase_stress_div(phis, fp.gamma1);
    for (int j = 0; j < r.u.nj(); ++j) {
      for (int i = 0; i < r.u.ni(); ++i) {
        r.u(i, j) = -r.u(i, j);
        r.v(i, j) = -r.v(i, j);
      }
    }
  } else if (fp.include_r) {
    r = assemble_R(phis, extrapolate(state.v_prev, state.v), fp, fp.re_a_ref());
  }
  MomentumResult mom = intermediate_velocity(state, phis, r, fp, dt, momentum);

  Field next(layout, 1);
  next.copy_owned(phi_next);
  update_ghosts(next);
  const Field rho = averaged_density(next, fp);
  StepResult prs = pressure_poisson(mom.u, rho, pressure, &state.p);

  state.v_prev = std::move(state.v);
  state.v = velocity_correction(mom.u, prs.field, rho);
  state.u_star = std::move(mom.u);
  state.p = std::move(prs.field);
  return {mom.report_u, mom.report_v, prs.report};
}

double max_interior_divergence(const VectorField& v_in) {
  const VectorField v = fresh(v_in);
  const Field d = div(v);
  double local = 0.0;
  for (int j = 0; j < d.nj(); ++j) {
    if (is_wall_row(d, j)) continue;
    for (int i = 0; i < d.ni(); ++i) local = std::max(local, std::fabs(d(i, j)));
  }
  return d.layout().comm().max(local);
}

double checkerboard_amplitude(const Field& p_in) {
  Field p = p_in;
  update_ghosts(p);
  double local = 0.0;
  for (int j = 0; j < p.nj(); ++j) {
    for (int i = 0; i < p.ni(); ++i) {
      local = std::max(local, 0.25 * std::fabs(p(i + 1, j) - 2.0 * p(i, j) + p(i - 1, j)));
      if (!is_wall_row(p, j)) {
        local = std::max(local, 0.25 * std::fabs(p(i, j + 1) - 2.0 * p(i, j) + p(i, j - 1)));
      }
    }
  }
  return p.layout().comm().max(local);
}

}  // namespace biofilm
