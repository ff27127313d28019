#pragma once

#include <string>

#include "biofilm/errors.hpp"
#include "biofilm/mesh.hpp"
#include "biofilm/stencil.hpp"

namespace biofilm {

enum class Preconditioner { None, Jacobi };

enum class Nullspace {
  None,
  Constants,  // constant functions over the unique nodes
  // Constants on each of the (x-parity, y-parity) sub-lattices: the kernel
  // of the collocated div((1/rho) grad) pressure operator, whose central
  // differences skip every other node. An odd count of unique columns
  // links the x classes through the periodic seam, leaving y parity only.
  ParityConstants,
};

struct SolverConfig {
  double rtol = 1e-8;
  double atol = 1e-12;
  int max_iterations = 500;
  int restart = 30;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  Nullspace nullspace = Nullspace::None;

  /// Throws ContractError naming the offending field.
  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // final true residual ||b - Ax||_2 (after projection of b)
  double target = 0.0;    // max(rtol ||b||_2, atol)
  bool converged = false;
};

/// A time step's linear solve missed its tolerance.
class StepError : public Error {
 public:
  StepError(const std::string& system, const SolveReport& report);
  const std::string& system() const { return system_; }
  const SolveReport& report() const { return report_; }

 private:
  std::string system_;
  SolveReport report_;
};

/// Inner product and 2-norm over owned nodes, reduced in rank order.
double dot(const Field& a, const Field& b);
double norm2(const Field& a);

/// Removes the null-space component from `b` in place.
void nullspace_project(Field& b, Nullspace kind);
/// b - mean(b) over unique nodes.
Field nullspace_project(const Field& b);

/// z = r / diag(A). Throws PreconditionerError on a zero diagonal.
Field jacobi_apply(const StencilMatrix& a, const Field& r);

/// Restarted, left-preconditioned GMRES with modified Gram-Schmidt.
///
/// `x` carries the initial guess in and the solution out. Convergence is
/// declared on the true residual: ||b - Ax||_2 <= max(rtol ||b||_2, atol),
/// where b has already been projected when a null space is configured. The
/// inner iteration stops on the preconditioned residual estimate, scaled so
/// that it tracks the true-residual target, and a restart follows whenever
/// the recomputed residual still misses it. With a null space, the null
/// components of x are removed after every cycle. Collective.
///
/// Never throws on non-convergence; inspect SolveReport::converged.
SolveReport gmres_solve(const StencilMatrix& a, const Field& b, Field& x, const SolverConfig& cfg);

}  // namespace biofilm
