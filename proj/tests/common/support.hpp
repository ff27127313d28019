#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>

#include "biofilm/comm.hpp"
#include "biofilm/mesh.hpp"

namespace support {

using biofilm::Field;

// A one-rank layout that outlives its fields.
struct Serial {
  std::unique_ptr<biofilm::Comm> comm = biofilm::make_self_comm();
  biofilm::LayoutPtr layout;

  explicit Serial(const biofilm::GridSpec& g) : layout(biofilm::make_layout(g, *comm)) {}
  Serial(int nx, int ny) : Serial(biofilm::GridSpec::from_nodes(nx, ny)) {}
};

// Global node numbering k = j * nxu + i with the boundary maps the solver
// uses: periodic in x, even reflection about the walls in y.
struct Index {
  int nxu, ny;

  explicit Index(const biofilm::GridSpec& g) : nxu(g.unique_nx()), ny(g.ny) {}
  int n() const { return nxu * ny; }
  int wrap(int i) const { return ((i % nxu) + nxu) % nxu; }
  int reflect(int j) const {
    if (j < 0) return -j;
    if (j > ny - 1) return 2 * (ny - 1) - j;
    return j;
  }
  int operator()(int i, int j) const { return reflect(j) * nxu + wrap(i); }
};

// 5-point Laplacian with the same index maps, as a dense matrix.
inline Eigen::MatrixXd dense_laplacian(const biofilm::GridSpec& g) {
  Index idx(g);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(idx.n(), idx.n());
  const double rx = 1 / (g.dx * g.dx), ry = 1 / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < idx.nxu; ++i) {
      const int r = idx(i, j);
      a(r, r) -= 2 * rx + 2 * ry;
      a(r, idx(i - 1, j)) += rx;
      a(r, idx(i + 1, j)) += rx;
      a(r, idx(i, j - 1)) += ry;
      a(r, idx(i, j + 1)) += ry;
    }
  return a;
}

inline Eigen::VectorXd to_vec(const Field& f) {
  Eigen::VectorXd v(f.ni() * f.nj());
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) v(j * f.ni() + i) = f(i, j);
  return v;
}

inline void from_vec(Field& f, const Eigen::VectorXd& v) {
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) f(i, j) = v(j * f.ni() + i);
}

inline void randomize(Field& f, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) f(i, j) = d(rng);
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int j = 0; j < a.nj(); ++j)
    for (int i = 0; i < a.ni(); ++i) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (int j = 0; j < a.nj(); ++j)
    for (int i = 0; i < a.ni(); ++i) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

}  // namespace support
