#include "biofilm/operators.hpp"

#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

void require_ghost(const Field& f, int width, const char* op) {
  if (f.ghost() < width) {
    throw ContractError(std::string(op) + ": needs ghost width " + std::to_string(width));
  }
}

Field output_like(const Field& f) { return Field(f.layout_ptr(), 1); }

}  // namespace

VectorField grad(const Field& f) {
  require_ghost(f, 1, "grad");
  const GridSpec& g = f.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  VectorField out{output_like(f), output_like(f)};
  for (int j = 0; j < f.nj(); ++j) {
    for (int i = 0; i < f.ni(); ++i) {
      out.u(i, j) = (f(i + 1, j) - f(i - 1, j)) * rx;
      out.v(i, j) = (f(i, j + 1) - f(i, j - 1)) * ry;
    }
  }
  return out;
}

Field div(const VectorField& vf) {
  require_ghost(vf.u, 1, "div");
  require_ghost(vf.v, 1, "div");
  const GridSpec& g = vf.u.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  Field out = output_like(vf.u);
  for (int j = 0; j < out.nj(); ++j)
    for (int i = 0; i < out.ni(); ++i)
      out(i, j) = (vf.u(i + 1, j) - vf.u(i - 1, j)) * rx + (vf.v(i, j + 1) - vf.v(i, j - 1)) * ry;
  return out;
}

Field laplacian(const Field& f) {
  require_ghost(f, 1, "laplacian");
  const GridSpec& g = f.layout().grid();
  const double rx = 1.0 / (g.dx * g.dx), ry = 1.0 / (g.dy * g.dy);
  Field out = output_like(f);
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i)
      out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * rx +
                  (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * ry;
  return out;
}

Field div_coeff_grad(const Field& a, const Field& f, WallFlux walls, bool require_positive) {
  require_ghost(a, 1, "div_coeff_grad");
  require_ghost(f, 1, "div_coeff_grad");
  const GridSpec& g = f.layout().grid();
  const Subdomain& s = f.layout().sub();
  const double rx = 1.0 / (g.dx * g.dx), ry = 1.0 / (g.dy * g.dy);
  const bool drop_south = walls == WallFlux::Zero && s.bottom_wall();
  const bool drop_north = walls == WallFlux::Zero && s.top_wall();
  Field out = output_like(f);
  bool bad = false;
  for (int j = 0; j < f.nj(); ++j) {
    const bool south = !(drop_south && j == 0);
    const bool north = !(drop_north && j == f.nj() - 1);
    for (int i = 0; i < f.ni(); ++i) {
      const double c = a(i, j);
      const double ae = 0.5 * (c + a(i + 1, j));
      const double aw = 0.5 * (c + a(i - 1, j));
      const double an = north ? 0.5 * (c + a(i, j + 1)) : 0.0;
      const double as = south ? 0.5 * (c + a(i, j - 1)) : 0.0;
      if (require_positive) {
        bad |= !(ae > 0.0) || !(aw > 0.0) || (north && !(an > 0.0)) || (south && !(as > 0.0));
      }
      const double fc = f(i, j);
      double val = (ae * (f(i + 1, j) - fc) - aw * (fc - f(i - 1, j))) * rx;
      if (north) val += an * (f(i, j + 1) - fc) * ry;
      if (south) val -= as * (fc - f(i, j - 1)) * ry;
      out(i, j) = val;
    }
  }
  if (require_positive && f.layout().comm().any(bad)) {
    throw CoefficientError("div_coeff_grad: non-positive face coefficient");
  }
  return out;
}

Field advect(const Field& f, const VectorField& vf) {
  require_ghost(f, 1, "advect");
  require_ghost(vf.u, 1, "advect");
  require_ghost(vf.v, 1, "advect");
  const GridSpec& g = f.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  Field out = output_like(f);
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i)
      out(i, j) = (f(i + 1, j) * vf.u(i + 1, j) - f(i - 1, j) * vf.u(i - 1, j)) * rx +
                  (f(i, j + 1) * vf.v(i, j + 1) - f(i, j - 1) * vf.v(i, j - 1)) * ry;
  return out;
}

VectorField convective_derivative(const VectorField& vf) {
  require_ghost(vf.u, 1, "convective_derivative");
  require_ghost(vf.v, 1, "convective_derivative");
  const GridSpec& g = vf.u.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  const Field& u = vf.u;
  const Field& v = vf.v;
  VectorField out{output_like(u), output_like(u)};
  for (int j = 0; j < u.nj(); ++j) {
    for (int i = 0; i < u.ni(); ++i) {
      const double uc = u(i, j), vc = v(i, j);
      out.u(i, j) = uc * (u(i + 1, j) - u(i - 1, j)) * rx + vc * (u(i, j + 1) - u(i, j - 1)) * ry;
      out.v(i, j) = uc * (v(i + 1, j) - v(i - 1, j)) * rx + vc * (v(i, j + 1) - v(i, j - 1)) * ry;
    }
  }
  return out;
}

SymTensorField rate_of_strain(const VectorField& vf) {
  require_ghost(vf.u, 1, "rate_of_strain");
  require_ghost(vf.v, 1, "rate_of_strain");
  const GridSpec& g = vf.u.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  const Field& u = vf.u;
  const Field& v = vf.v;
  SymTensorField d{output_like(u), output_like(u), output_like(u)};
  for (int j = 0; j < u.nj(); ++j) {
    for (int i = 0; i < u.ni(); ++i) {
      const double ux = (u(i + 1, j) - u(i - 1, j)) * rx;
      const double uy = (u(i, j + 1) - u(i, j - 1)) * ry;
      const double vx = (v(i + 1, j) - v(i - 1, j)) * rx;
      const double vy = (v(i, j + 1) - v(i, j - 1)) * ry;
      d.xx(i, j) = ux;
      d.xy(i, j) = 0.5 * (uy + vx);
      d.yy(i, j) = vy;
    }
  }
  return d;
}

VectorField div_tensor(const SymTensorField& t) {
  require_ghost(t.xx, 1, "div_tensor");
  require_ghost(t.xy, 1, "div_tensor");
  require_ghost(t.yy, 1, "div_tensor");
  const GridSpec& g = t.xx.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  VectorField out{output_like(t.xx), output_like(t.xx)};
  for (int j = 0; j < t.xx.nj(); ++j) {
    for (int i = 0; i < t.xx.ni(); ++i) {
      out.u(i, j) = (t.xx(i + 1, j) - t.xx(i - 1, j)) * rx + (t.xy(i, j + 1) - t.xy(i, j - 1)) * ry;
      out.v(i, j) = (t.xy(i + 1, j) - t.xy(i - 1, j)) * rx + (t.yy(i, j + 1) - t.yy(i, j - 1)) * ry;
    }
  }
  return out;
}

VectorField phase_stress_div(const Field& phi, double gamma1) {
  require_ghost(phi, 2, "phase_stress_div");
  const GridSpec& g = phi.layout().grid();
  const double rx = 0.5 / g.dx, ry = 0.5 / g.dy;
  // The tensor is formed on owned nodes plus one ring, straight from phi's
  // second ghost layer, so no exchange of the tensor itself is needed.
  SymTensorField t{output_like(phi), output_like(phi), output_like(phi)};
  for (int j = -1; j <= phi.nj(); ++j) {
    for (int i = -1; i <= phi.ni(); ++i) {
      const double px = (phi(i + 1, j) - phi(i - 1, j)) * rx;
      const double py = (phi(i, j + 1) - phi(i, j - 1)) * ry;
      t.xx(i, j) = gamma1 * px * px;
      t.xy(i, j) = gamma1 * px * py;
      t.yy(i, j) = gamma1 * py * py;
    }
  }
  return div_tensor(t);
}

}  // namespace biofilm
