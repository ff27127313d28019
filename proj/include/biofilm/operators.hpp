#pragma once

#include "biofilm/mesh.hpp"

// Second-order central finite differences on owned nodes. Every operator reads
// ghost cells as they are: the caller exchanges and fills them first.
namespace biofilm {

struct VectorField {
  Field u;
  Field v;
};

struct TensorSample {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

/// Node-wise symmetric 2x2 tensor.
struct SymTensorField {
  Field xx, xy, yy;

  TensorSample at(int i, int j) const { return {xx(i, j), xy(i, j), xy(i, j), yy(i, j)}; }
};

/// How flux-form operators treat the face outside a wall node.
enum class WallFlux {
  Ghost,  // difference against the ghost value like any other face
  Zero,   // no flux through the wall: the outer face is dropped
};

VectorField grad(const Field& f);
Field div(const VectorField& vf);
Field laplacian(const Field& f);

/// div(a grad f) in conservative face form with arithmetic-mean face
/// coefficients. Throws CoefficientError when `require_positive` and a face
/// coefficient that is read is not positive.
Field div_coeff_grad(const Field& a, const Field& f, WallFlux walls = WallFlux::Ghost,
                     bool require_positive = false);

/// div(f v), central conservative form.
Field advect(const Field& f, const VectorField& vf);

/// (v . grad) v
VectorField convective_derivative(const VectorField& vf);

/// D = (grad v + grad v^T) / 2
SymTensorField rate_of_strain(const VectorField& vf);

/// Row-wise central divergence of a symmetric tensor field (ghosts read).
VectorField div_tensor(const SymTensorField& t);

/// div(gamma1 grad(phi) grad(phi)). Needs two ghost layers on phi.
VectorField phase_stress_div(const Field& phi, double gamma1);

}  // namespace biofilm
