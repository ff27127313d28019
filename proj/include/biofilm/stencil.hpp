#pragma once

#include <functional>
#include <span>
#include <vector>

#include "biofilm/mesh.hpp"

namespace biofilm {

struct StencilOffset {
  int di = 0;
  int dj = 0;
  friend bool operator==(const StencilOffset&, const StencilOffset&) = default;
};

struct StencilEntry {
  int di = 0;
  int dj = 0;
  double value = 0.0;
};

/// Sparse operator addressed by (node, offset). Stored as one dense
/// coefficient plane per distinct offset over the owned nodes, so a row of
/// the product is a short sum of shifted, element-wise products.
class StencilMatrix {
 public:
  const Layout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }

  /// Largest |di| or |dj| present; the ghost width matvec needs.
  int radius() const { return radius_; }
  std::span<const StencilOffset> offsets() const { return offsets_; }
  /// Coefficients of offset k for owned row j (ni values).
  const double* plane_row(std::size_t k, int j) const {
    return planes_[k].data() + static_cast<std::size_t>(j) * ni_;
  }
  /// Coefficient of (di, dj) in local row (i, j); 0 when absent.
  double coefficient(int i, int j, int di, int dj) const;
  double diagonal(int i, int j) const { return coefficient(i, j, 0, 0); }

 private:
  friend class StencilAssembler;

  LayoutPtr layout_;
  int radius_ = 0;
  int ni_ = 0, nj_ = 0;
  std::vector<StencilOffset> offsets_;
  std::vector<std::vector<double>> planes_;
};

/// Row-by-row construction with insert-once semantics. Entries repeating an
/// offset inside one row are summed.
class StencilAssembler {
 public:
  explicit StencilAssembler(LayoutPtr layout, int max_radius = 2);

  /// Local owned row (i, j). Throws AssemblyError when the row was already
  /// set, an offset exceeds the radius, or an offset leaves the domain
  /// through a wall (wall ghosts must be folded into the row first).
  void set_row(int i, int j, std::span<const StencilEntry> entries);

  /// Throws AssemblyError if any owned row was never set. Collective.
  StencilMatrix finish();

 private:
  LayoutPtr layout_;
  int max_radius_;
  int ni_, nj_;
  std::vector<std::vector<StencilEntry>> rows_;
  std::vector<char> seen_;
};

/// Assembles every owned row from row_fn(i, j, entries).
StencilMatrix assemble(LayoutPtr layout, int max_radius,
                       const std::function<void(int, int, std::vector<StencilEntry>&)>& row_fn);

/// Builds one row while eliminating wall ghosts by even reflection: an entry
/// aimed at global row -k lands on row k, one aimed at ny-1+k lands on
/// ny-1-k.
class StencilRow {
 public:
  StencilRow(int global_j, int ny) : gj_(global_j), ny_(ny) {}

  void add(int di, int dj, double value);
  /// Adds `scale` times another row whose equation sits at global row
  /// gj + dj_shift (for composing operators).
  void add_row(const StencilRow& other, int di_shift, int dj_shift, double scale);

  std::span<const StencilEntry> entries() const { return entries_; }
  std::vector<StencilEntry>& entries() { return entries_; }

 private:
  int gj_;
  int ny_;
  std::vector<StencilEntry> entries_;
};

/// y = A x on owned rows. Exchanges x's halo first (x's ghost width must be
/// at least A.radius()).
void matvec(const StencilMatrix& a, Field& x, Field& y);

}  // namespace biofilm
