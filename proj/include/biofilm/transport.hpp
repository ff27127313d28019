#pragma once

#include "biofilm/linsolve.hpp"
#include "biofilm/mesh.hpp"
#include "biofilm/operators.hpp"

namespace biofilm {

enum class Advection {
  Explicit,       // extrapolated level, right-hand side only
  CrankNicolson,  // central flux form averaged over the step, inside the matrix
};

struct ChParams {
  double gamma1 = 33.467;  // conformation entropy (gradient energy)
  double gamma2 = 1.25e6;  // double-well height
  double lambda = 1e-10;   // mobility
  double mu = 0.14;        // max production rate
  double kc = 0.15;        // Monod half-saturation
  double epsilon = 1.0;    // production scaling
  Advection advection = Advection::CrankNicolson;
  // Adds S (phi^{n+1} - phi^n) to the potential with S = stabilization * 2 gamma2,
  // the largest f'' on [0, 1]. 0 keeps the bulk term purely explicit.
  double stabilization = 1.0;

  void validate() const;
};

struct NutrientParams {
  double ds = 2.3;  // diffusivity
  double a = 100.0;  // max consumption rate
  Advection advection = Advection::CrankNicolson;
  double theta = 1.0;  // implicit weight of diffusion, 0.5 for Crank-Nicolson

  void validate() const;
};

/// Two consecutive time levels of a scalar. `prev` equals `curr` before the
/// first step, which makes the extrapolation first order once.
struct History {
  Field prev;
  Field curr;

  /// (3 curr - prev) / 2 with ghosts updated.
  Field extrapolated() const;
  void advance(const Field& next);
};

using PhiHistory = History;

/// 2 gamma2 phi (1 - phi)(1 - 2 phi)
double bulk_potential_derivative(double phi, double gamma2);

/// -gamma1 lap(phi) + f'(phi). Reads one ghost layer of phi.
Field chemical_potential(const Field& phi, const ChParams& p);

/// dx dy sum over unique nodes of gamma1/2 |grad_h phi|^2 + gamma2 phi^2 (1 - phi)^2,
/// with central gradients and mirrored wall ghosts. Collective.
double free_energy(const Field& phi, const ChParams& p);

/// epsilon mu phi c / (kc + c). Throws DomainError (on every rank) when
/// kc + c <= 0 somewhere.
Field growth_rate(const Field& phi, const Field& c, const ChParams& p);

struct StepResult {
  Field field;
  SolveReport report;
};

/// One step of the degenerate-mobility Cahn-Hilliard equation with
/// production. The gradient-energy part is Crank-Nicolson; mobility, bulk
/// potential and production use phi* = (3 phi^n - phi^{n-1})/2, the bulk
/// part optionally stabilized (see ChParams::stabilization). Advection by
/// v^n is either Crank-Nicolson or explicit in phi*, per p.advection.
/// No flux crosses the walls. Throws StepError when the solve misses its
/// tolerance. Collective.
StepResult ch_step(const PhiHistory& phi, const VectorField& vel, const Field& c, const ChParams& p,
                   double dt, const SolverConfig& solver);

/// One step of phi_s-weighted nutrient transport with consumption, run after
/// ch_step so phi^{n+1} is known. Diffusion is theta-weighted, consumption
/// is fully implicit (a Crank-Nicolson sink flips the sign of c once
/// A phi_n dt > 2). Advection is Crank-Nicolson or explicit in
/// c* = (3 c^n - c^{n-1})/2, per p.advection.
/// Throws DomainError when phi_s <= 0 anywhere, StepError on a failed
/// solve. Collective.
StepResult nutrient_step(const History& c, const PhiHistory& phi, const Field& phi_next,
                         const VectorField& vel, const NutrientParams& p, double dt,
                         const SolverConfig& solver);

}  // namespace biofilm
