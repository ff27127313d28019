#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "biofilm/comm.hpp"

namespace biofilm {

/// Node-collocated grid on the unit square, periodic in x, walls at y = 0, 1.
/// Column nx-1 is the periodic image of column 0 and is not stored, so a
/// field holds (nx-1) x ny unique nodes.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  static GridSpec from_nodes(int nx, int ny);
  /// `n` spatial intervals per direction: (n+1) x (n+1) nodes.
  static GridSpec from_intervals(int n);

  int unique_nx() const { return nx - 1; }
  std::size_t unique_nodes() const {
    return static_cast<std::size_t>(unique_nx()) * static_cast<std::size_t>(ny);
  }
  double x(int gi) const { return gi * dx; }
  double y(int gj) const { return gj * dy; }
};

inline constexpr int kWall = -1;

/// One rank's owned block [i_lo, i_hi) x [j_lo, j_hi) of unique global nodes.
struct Subdomain {
  int rank = 0;
  int i_lo = 0, i_hi = 0;
  int j_lo = 0, j_hi = 0;
  int left = 0, right = 0;  // always present (periodic)
  int down = kWall, up = kWall;

  int ni() const { return i_hi - i_lo; }
  int nj() const { return j_hi - j_lo; }
  bool bottom_wall() const { return down == kWall; }
  bool top_wall() const { return up == kWall; }
};

struct Decomposition {
  GridSpec grid;
  int px = 1;  // ranks along x
  int py = 1;  // ranks along y
  std::vector<Subdomain> parts;  // indexed by rank = ry * px + rx

  const Subdomain& of(int rank) const { return parts.at(rank); }
};

/// Cartesian split into px * py = ranks blocks: nearest-to-square rank grid,
/// then smallest halo perimeter, then more ranks along x. Owned extents along
/// a direction differ by at most one node.
Decomposition decompose(const GridSpec& grid, int ranks);

/// Everything a rank needs to know about where its data lives.
class Layout {
 public:
  Layout(Decomposition decomposition, Comm& comm);

  const GridSpec& grid() const { return decomposition_.grid; }
  const Decomposition& decomposition() const { return decomposition_; }
  const Subdomain& sub() const { return decomposition_.of(comm_->rank()); }
  Comm& comm() const { return *comm_; }
  int rank() const { return comm_->rank(); }

 private:
  Decomposition decomposition_;
  Comm* comm_;
};

using LayoutPtr = std::shared_ptr<const Layout>;

LayoutPtr make_layout(const GridSpec& grid, Comm& comm);

struct GhostPolicy {
  enum class Kind { None, EvenMirror, Dirichlet };
  Kind kind = Kind::None;
  double value = 0.0;

  static GhostPolicy none() { return {}; }
  static GhostPolicy mirror() { return {Kind::EvenMirror, 0.0}; }
  static GhostPolicy dirichlet(double v) { return {Kind::Dirichlet, v}; }
};

/// Rank-local scalar array over owned nodes plus `ghost` layers on each side.
/// Local indices run over [-ghost, n + ghost) in each direction; (0, 0) is the
/// first owned node.
class Field {
 public:
  Field() = default;
  Field(LayoutPtr layout, int ghost, GhostPolicy bottom = GhostPolicy::mirror(),
        GhostPolicy top = GhostPolicy::mirror());

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  int ni() const { return ni_; }
  int nj() const { return nj_; }
  int ghost() const { return ghost_; }
  int stride() const { return stride_; }

  double* row(int j) { return data_.data() + index(0, j); }
  const double* row(int j) const { return data_.data() + index(0, j); }

  const Layout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  bool valid() const { return static_cast<bool>(layout_); }

  GhostPolicy bottom_policy() const { return bottom_; }
  GhostPolicy top_policy() const { return top_; }
  void set_policies(GhostPolicy bottom, GhostPolicy top) {
    bottom_ = bottom;
    top_ = top;
  }

  int gi(int i) const { return i + i_lo_; }
  int gj(int j) const { return j + j_lo_; }
  double x(int i) const { return gi(i) * dx_; }
  double y(int j) const { return gj(j) * dy_; }

  /// Sets every entry, ghosts included.
  void fill(double value);
  /// Copies owned values from `other` (same layout, any ghost width).
  void copy_owned(const Field& other);
  /// Zero-initialised field on the same layout with this field's policies.
  Field like(int ghost) const;
  Field like() const { return like(ghost_); }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + ghost_) * stride_ + static_cast<std::size_t>(i + ghost_);
  }

  LayoutPtr layout_;
  int ghost_ = 0;
  int ni_ = 0, nj_ = 0;
  int stride_ = 0;
  int i_lo_ = 0, j_lo_ = 0;
  double dx_ = 0.0, dy_ = 0.0;
  GhostPolicy bottom_, top_;
  std::vector<double> data_;
};

/// Sets every owned node from fn(x, y).
template <class Fn>
void assign(Field& f, Fn&& fn) {
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) f(i, j) = fn(f.x(i), f.y(j));
}

/// Copies neighbour-owned values into ghost cells (periodic x wraps).
/// Physical-wall ghosts are left alone. Collective.
void halo_exchange(Field& f);

/// Applies the wall ghost policy on edges that lie on y = 0 or y = 1.
void fill_physical_ghosts(Field& f);

/// halo_exchange followed by fill_physical_ghosts on edges whose policy is
/// not None.
void update_ghosts(Field& f);

enum class Reduce { Sum, Max };

/// Reduction over owned (unique) nodes. Collective. Sums go through
/// global_sum and do not depend on the decomposition.
double global_reduce(const Field& f, Reduce kind);

/// Sum over owned nodes of a (or of a * b), bitwise identical for every
/// decomposition and kernel variant. Terms are pre-rounded against a few
/// fixed grids derived from the global max |term| and the node count, which
/// makes every partial sum exact. Relative to n max|term| the result carries
/// about 2 (52 - log2 n) bits. Collective.
double global_sum(const Field& a, const Field* b = nullptr);

/// global_sum with a caller-supplied bound on max |term|, equal on every
/// rank; skips the pass that finds the max. A loose bound costs about
/// log2(bound / max) bits of accuracy.
double global_sum_bounded(const Field& a, const Field* b, double bound);

/// Owned values of every rank assembled into a (nx-1) x ny row-major array on
/// `root`; empty on other ranks. Collective.
std::vector<double> gather_global(const Field& f, int root = 0);

/// Sets owned values from a global (nx-1) x ny row-major array.
void scatter_global(Field& f, std::span<const double> global);

}  // namespace biofilm
