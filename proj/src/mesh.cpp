#include "biofilm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "biofilm/errors.hpp"
#include "biofilm/kernels.hpp"

namespace biofilm {

GridSpec GridSpec::from_nodes(int nx, int ny) {
  if (nx < 4 || ny < 4) {
    throw ContractError("grid needs at least 4 nodes per direction (got " + std::to_string(nx) +
                        " x " + std::to_string(ny) + ")");
  }
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.dx = 1.0 / (nx - 1);
  g.dy = 1.0 / (ny - 1);
  return g;
}

GridSpec GridSpec::from_intervals(int n) { return from_nodes(n + 1, n + 1); }

namespace {

// Splits n items over p parts, the first n % p parts one larger.
std::vector<int> split_offsets(int n, int p) {
  std::vector<int> off(p + 1, 0);
  int base = n / p, extra = n % p;
  for (int k = 0; k < p; ++k) off[k + 1] = off[k] + base + (k < extra ? 1 : 0);
  return off;
}

}  // namespace

Decomposition decompose(const GridSpec& grid, int ranks) {
  if (ranks < 1) throw DecompositionError("rank count must be positive");
  const int nxu = grid.unique_nx();
  const int ny = grid.ny;

  int best_px = 0, best_py = 0;
  long best_diff = std::numeric_limits<long>::max();
  long best_halo = std::numeric_limits<long>::max();
  for (int px = 1; px <= ranks; ++px) {
    if (ranks % px != 0) continue;
    int py = ranks / px;
    if (px > nxu || py > ny) continue;
    long diff = std::labs(static_cast<long>(px) - py);
    long halo = (px > 1 ? static_cast<long>(px) * ny : 0L) + static_cast<long>(py - 1) * nxu;
    bool better = diff < best_diff || (diff == best_diff && halo < best_halo) ||
                  (diff == best_diff && halo == best_halo && px > best_px);
    if (better) {
      best_px = px;
      best_py = py;
      best_diff = diff;
      best_halo = halo;
    }
  }
  if (best_px == 0) {
    throw DecompositionError(std::to_string(ranks) + " ranks cannot tile a " +
                             std::to_string(nxu) + " x " + std::to_string(ny) + " node grid");
  }

  Decomposition d;
  d.grid = grid;
  d.px = best_px;
  d.py = best_py;
  auto xo = split_offsets(nxu, best_px);
  auto yo = split_offsets(ny, best_py);
  d.parts.resize(ranks);
  for (int ry = 0; ry < best_py; ++ry) {
    for (int rx = 0; rx < best_px; ++rx) {
      int r = ry * best_px + rx;
      Subdomain& s = d.parts[r];
      s.rank = r;
      s.i_lo = xo[rx];
      s.i_hi = xo[rx + 1];
      s.j_lo = yo[ry];
      s.j_hi = yo[ry + 1];
      s.left = ry * best_px + (rx + best_px - 1) % best_px;
      s.right = ry * best_px + (rx + 1) % best_px;
      s.down = ry > 0 ? r - best_px : kWall;
      s.up = ry + 1 < best_py ? r + best_px : kWall;
    }
  }
  return d;
}

Layout::Layout(Decomposition decomposition, Comm& comm)
    : decomposition_(std::move(decomposition)), comm_(&comm) {
  if (static_cast<int>(decomposition_.parts.size()) != comm.size()) {
    throw ContractError("decomposition does not match communicator size");
  }
}

LayoutPtr make_layout(const GridSpec& grid, Comm& comm) {
  return std::make_shared<const Layout>(decompose(grid, comm.size()), comm);
}

Field::Field(LayoutPtr layout, int ghost, GhostPolicy bottom, GhostPolicy top)
    : layout_(std::move(layout)), ghost_(ghost), bottom_(bottom), top_(top) {
  if (!layout_) throw ContractError("Field needs a layout");
  if (ghost < 0 || ghost > 2) throw ContractError("ghost width must be 0, 1 or 2");
  const Subdomain& s = layout_->sub();
  ni_ = s.ni();
  nj_ = s.nj();
  i_lo_ = s.i_lo;
  j_lo_ = s.j_lo;
  dx_ = layout_->grid().dx;
  dy_ = layout_->grid().dy;
  stride_ = ni_ + 2 * ghost_;
  data_.assign(static_cast<std::size_t>(stride_) * (nj_ + 2 * ghost_), 0.0);
}

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Field::copy_owned(const Field& other) {
  if (other.ni_ != ni_ || other.nj_ != nj_) throw ContractError("copy_owned: shape mismatch");
  for (int j = 0; j < nj_; ++j) std::copy(other.row(j), other.row(j) + ni_, row(j));
}

Field Field::like(int ghost) const { return Field(layout_, ghost, bottom_, top_); }

namespace {

enum Tag : int { kToLeft = 11, kToRight = 12, kToDown = 13, kToUp = 14 };

// Strip of `cols` x `rows` starting at local (i0, j0), prefixed with the
// sender's ghost width so mismatched exchanges are caught.
std::vector<double> pack(const Field& f, int i0, int j0, int cols, int rows) {
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(cols) * rows + 1);
  buf.push_back(f.ghost());
  for (int j = j0; j < j0 + rows; ++j)
    for (int i = i0; i < i0 + cols; ++i) buf.push_back(f(i, j));
  return buf;
}

void unpack(Field& f, const std::vector<double>& buf, int i0, int j0, int cols, int rows) {
  if (buf.empty() || static_cast<int>(buf[0]) != f.ghost() ||
      buf.size() != static_cast<std::size_t>(cols) * rows + 1) {
    throw ContractError("halo_exchange: ghost width mismatch between communicating fields");
  }
  std::size_t k = 1;
  for (int j = j0; j < j0 + rows; ++j)
    for (int i = i0; i < i0 + cols; ++i) f(i, j) = buf[k++];
}

}  // namespace

void halo_exchange(Field& f) {
  const int g = f.ghost();
  if (g == 0) return;
  const Subdomain& s = f.layout().sub();
  Comm& comm = f.layout().comm();
  const int me = comm.rank();
  const int ni = f.ni(), nj = f.nj();

  if (ni < g) throw ContractError("halo_exchange: owned x-extent smaller than ghost width");

  // x direction over owned rows.
  if (s.left == me) {
    for (int j = 0; j < nj; ++j) {
      for (int k = 1; k <= g; ++k) {
        f(-k, j) = f(ni - k, j);
        f(ni - 1 + k, j) = f(k - 1, j);
      }
    }
  } else {
    comm.send(s.left, kToLeft, pack(f, 0, 0, g, nj));
    comm.send(s.right, kToRight, pack(f, ni - g, 0, g, nj));
    unpack(f, comm.recv(s.right, kToLeft), ni, 0, g, nj);
    unpack(f, comm.recv(s.left, kToRight), -g, 0, g, nj);
  }

  // y direction over full padded rows, which carries the corners along.
  const int width = ni + 2 * g;
  if ((s.down != kWall || s.up != kWall) && nj < g) {
    throw ContractError("halo_exchange: owned y-extent smaller than ghost width");
  }
  if (s.down != kWall) comm.send(s.down, kToDown, pack(f, -g, 0, width, g));
  if (s.up != kWall) comm.send(s.up, kToUp, pack(f, -g, nj - g, width, g));
  if (s.up != kWall) unpack(f, comm.recv(s.up, kToDown), -g, nj, width, g);
  if (s.down != kWall) unpack(f, comm.recv(s.down, kToUp), -g, -g, width, g);
}

namespace {

void fill_edge(Field& f, GhostPolicy policy, bool bottom) {
  const int g = f.ghost();
  const int nj = f.nj();
  const int i0 = -g, i1 = f.ni() + g;
  // Local row index of the wall node and the inward direction.
  const int wall = bottom ? 0 : nj - 1;
  const int inward = bottom ? 1 : -1;
  switch (policy.kind) {
    case GhostPolicy::Kind::None:
      throw ContractError("fill_physical_ghosts: wall edge has no ghost policy");
    case GhostPolicy::Kind::EvenMirror:
      if (nj < g + 1) throw ContractError("fill_physical_ghosts: too few owned rows to mirror");
      for (int k = 1; k <= g; ++k)
        for (int i = i0; i < i1; ++i) f(i, wall - inward * k) = f(i, wall + inward * k);
      break;
    case GhostPolicy::Kind::Dirichlet:
      for (int k = 0; k <= g; ++k)
        for (int i = i0; i < i1; ++i) f(i, wall - inward * k) = policy.value;
      break;
  }
}

}  // namespace

void fill_physical_ghosts(Field& f) {
  const Subdomain& s = f.layout().sub();
  if (s.bottom_wall()) fill_edge(f, f.bottom_policy(), true);
  if (s.top_wall()) fill_edge(f, f.top_policy(), false);
}

void update_ghosts(Field& f) {
  halo_exchange(f);
  const Subdomain& s = f.layout().sub();
  if (s.bottom_wall() && f.bottom_policy().kind != GhostPolicy::Kind::None)
    fill_edge(f, f.bottom_policy(), true);
  if (s.top_wall() && f.top_policy().kind != GhostPolicy::Kind::None)
    fill_edge(f, f.top_policy(), false);
}

double global_sum(const Field& a, const Field* b) {
  const auto& k = kernels::active();
  double m = 0.0;
  for (int j = 0; j < a.nj(); ++j)
    m = std::fmax(m, b ? k.max_abs_prod(a.row(j), b->row(j), a.ni()) : k.max_abs(a.row(j), a.ni()));
  return global_sum_bounded(a, b, a.layout().comm().max(m));
}

double global_sum_bounded(const Field& a, const Field* b, double m) {
  constexpr int kFolds = 2;
  Comm& comm = a.layout().comm();
  const auto& k = kernels::active();
  if (m == 0.0) return 0.0;

  // Fold f rounds to multiples of 2^(e-51) where n * bound < 2^e; sigma =
  // 1.5 * 2^(e+1) keeps sigma + t in one binade, and n terms cannot
  // overflow the 53-bit grid. The remainder is at most half a step.
  const double n = static_cast<double>(a.layout().grid().unique_nodes());
  double sigma[kFolds];
  int folds = 0;
  double bound = m;
  for (; folds < kFolds; ++folds) {
    int e = 0;
    std::frexp(n * bound, &e);
    if (!std::isfinite(n * bound) || e > 1020) break;
    if (e < -1000) break;
    sigma[folds] = std::ldexp(1.5, e + 1);
    bound = std::ldexp(1.0, e - 52);
  }
  if (folds == 0) {  // inf, nan or near overflow: plain rank-ordered sum
    double local = 0.0;
    for (int j = 0; j < a.nj(); ++j) local += b ? k.dot(a.row(j), b->row(j), a.ni()) : k.sum(a.row(j), a.ni());
    return comm.sum(local);
  }
  double acc[kFolds] = {};
  for (int j = 0; j < a.nj(); ++j) k.fold(a.row(j), b ? b->row(j) : nullptr, a.ni(), sigma, folds, acc);
  const std::vector<double> total = comm.sum(std::span<const double>(acc, folds));
  double s = 0.0;
  for (int f = folds - 1; f >= 0; --f) s += total[f];
  return s;
}

double global_reduce(const Field& f, Reduce kind) {
  Comm& comm = f.layout().comm();
  if (kind == Reduce::Sum) return global_sum(f);
  double local = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) local = std::max(local, f(i, j));
  return comm.max(local);
}

std::vector<double> gather_global(const Field& f, int root) {
  std::vector<double> local;
  local.reserve(static_cast<std::size_t>(f.ni()) * f.nj());
  for (int j = 0; j < f.nj(); ++j) local.insert(local.end(), f.row(j), f.row(j) + f.ni());
  std::vector<double> all = f.layout().comm().gatherv(local, root);
  if (all.empty()) return all;

  const Decomposition& d = f.layout().decomposition();
  const int nxu = d.grid.unique_nx();
  std::vector<double> global(d.grid.unique_nodes());
  std::size_t k = 0;
  for (const Subdomain& s : d.parts)
    for (int gj = s.j_lo; gj < s.j_hi; ++gj)
      for (int gi = s.i_lo; gi < s.i_hi; ++gi)
        global[static_cast<std::size_t>(gj) * nxu + gi] = all[k++];
  return global;
}

void scatter_global(Field& f, std::span<const double> global) {
  const GridSpec& g = f.layout().grid();
  if (global.size() != g.unique_nodes()) throw ContractError("scatter_global: size mismatch");
  const int nxu = g.unique_nx();
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i)
      f(i, j) = global[static_cast<std::size_t>(f.gj(j)) * nxu + f.gi(i)];
}

}  // namespace biofilm
