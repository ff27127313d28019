#pragma once

#include <memory>

#include "biofilm/linsolve.hpp"
#include "biofilm/operators.hpp"
#include "biofilm/stencil.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

enum class Viscosity {
  Reference,  // implicit solvent viscosity, variable excess explicit inside R
  Averaged,   // implicit div(grad u / Re_a(phi*)) per component, R keeps only the phase stress
};

struct FlowParams {
  double re_s = 9.98e-4;  // solvent Reynolds number
  double re_n = 2.33e-9;  // network Reynolds number
  double gamma1 = 33.467;
  double rho_n_ratio = 1.0;
  double rho_s_ratio = 1.0;
  double lid_u = 0.0;  // top wall velocity
  double lid_v = 0.0;
  bool include_r = false;
  // implicit weight of the viscous term: 0.5 Crank-Nicolson, 1 backward Euler
  double viscous_theta = 1.0;
  Viscosity viscosity = Viscosity::Reference;

  void validate() const;
  /// Reynolds number of the implicit viscous operator: pure solvent.
  double re_a_ref() const { return re_s; }
};

/// Velocity components with ghost width 1 and Dirichlet wall policies
/// (0 at y = 0, the lid velocity at y = 1). Zero inside, walls applied.
VectorField make_velocity(const LayoutPtr& layout, const FlowParams& fp);

struct FlowState {
  VectorField v;
  VectorField v_prev;
  Field p;  // dt times the dimensionless pressure
  VectorField u_star;

  static FlowState quiescent(const LayoutPtr& layout, const FlowParams& fp);
};

/// phi_s rho_s/rho_0 + phi_n rho_n/rho_0, ghosts updated.
Field averaged_density(const Field& phi, const FlowParams& fp);

/// phi_n / Re_n + phi_s / Re_s, ghosts updated.
Field averaged_inverse_reynolds(const Field& phi, const FlowParams& fp);

/// -div(gamma1 grad phi grad phi) + div(2 [1/Re_a - 1/re_a_ref] D(v)).
/// phi needs two current ghost layers, v one.
VectorField assemble_R(const Field& phi, const VectorField& v, const FlowParams& fp, double re_a_ref);

struct MomentumResult {
  VectorField u;
  SolveReport report_u;
  SolveReport report_v;
};

/// Crank-Nicolson viscous step per velocity component,
///   (u - v^n)/dt = -[(v.grad)v]* + lap(u + v^n) / (2 rho* re_a_ref) + R / rho*,
/// with identity rows pinning the wall values. viscous_theta replaces the 1/2
/// weights; Viscosity::Averaged replaces lap/re_a_ref by div(grad / Re_a(phi*)).
/// Rows are scaled to a unit diagonal. `phi_star` and `R` belong to the
/// extrapolated level. Throws StepError. Collective.
MomentumResult intermediate_velocity(const FlowState& state, const Field& phi_star,
                                     const VectorField& r, const FlowParams& fp, double dt,
                                     const SolverConfig& solver);

/// Solves -div((1/rho) grad p) = div(u*) on the collocated grid with mirrored
/// p at the walls. The central operator splits into four decoupled
/// sub-lattices, so their constants are projected out and each comes back
/// with zero mean. Wall rows are halved to keep the system symmetric.
/// Throws CoefficientError for rho <= 0, StepError on a failed solve.
/// Collective.
StepResult pressure_poisson(const VectorField& u_star, const Field& rho, const SolverConfig& solver,
                            const Field* guess = nullptr);

/// u* + (1/rho) grad p on interior rows; wall rows keep u*'s Dirichlet values.
VectorField velocity_correction(const VectorField& u_star, const Field& p, const Field& rho);

struct FlowReport {
  SolveReport momentum_u;
  SolveReport momentum_v;
  SolveReport pressure;
};

/// R -> intermediate velocity -> pressure -> correction, then rotates the
/// velocity history. `phi` holds levels n-1 and n; `phi_next` gives the
/// density used by the projection. Collective.
FlowReport flow_step(FlowState& state, const PhiHistory& phi, const Field& phi_next,
                     const FlowParams& fp, double dt, const SolverConfig& momentum,
                     const SolverConfig& pressure);

/// Largest |div_h v| over nodes off the walls. Collective.
double max_interior_divergence(const VectorField& v);

/// Largest |p_{i+1} - 2 p_i + p_{i-1}| / 4 along grid lines, a measure of
/// the odd-even pressure mode. Collective.
double checkerboard_amplitude(const Field& p);

}  // namespace biofilm
