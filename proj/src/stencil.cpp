#include "biofilm/stencil.hpp"

#include <algorithm>
#include <cstdlib>

#include "biofilm/errors.hpp"
#include "biofilm/kernels.hpp"

namespace biofilm {

double StencilMatrix::coefficient(int i, int j, int di, int dj) const {
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    if (offsets_[k].di == di && offsets_[k].dj == dj) return plane_row(k, j)[i];
  }
  return 0.0;
}

StencilAssembler::StencilAssembler(LayoutPtr layout, int max_radius)
    : layout_(std::move(layout)), max_radius_(max_radius) {
  if (max_radius < 0 || max_radius > 2) throw AssemblyError("stencil radius must be 0..2");
  ni_ = layout_->sub().ni();
  nj_ = layout_->sub().nj();
  rows_.resize(static_cast<std::size_t>(ni_) * nj_);
  seen_.assign(rows_.size(), 0);
}

void StencilAssembler::set_row(int i, int j, std::span<const StencilEntry> entries) {
  if (i < 0 || i >= ni_ || j < 0 || j >= nj_) throw AssemblyError("set_row: row not owned");
  const std::size_t r = static_cast<std::size_t>(j) * ni_ + i;
  if (seen_[r]) throw AssemblyError("set_row: row assembled twice");
  seen_[r] = 1;
  const int gj = layout_->sub().j_lo + j;
  const int ny = layout_->grid().ny;
  auto& row = rows_[r];
  for (const StencilEntry& e : entries) {
    if (std::abs(e.di) > max_radius_ || std::abs(e.dj) > max_radius_) {
      throw AssemblyError("set_row: offset (" + std::to_string(e.di) + "," +
                          std::to_string(e.dj) + ") beyond stencil radius");
    }
    if (gj + e.dj < 0 || gj + e.dj >= ny) {
      throw AssemblyError("set_row: offset crosses a wall; fold the ghost into the row");
    }
    auto it = std::find_if(row.begin(), row.end(),
                           [&](const StencilEntry& x) { return x.di == e.di && x.dj == e.dj; });
    if (it != row.end()) {
      it->value += e.value;
    } else {
      row.push_back(e);
    }
  }
}

StencilMatrix StencilAssembler::finish() {
  if (std::find(seen_.begin(), seen_.end(), 0) != seen_.end()) {
    throw AssemblyError("finish: some owned rows were never assembled");
  }
  StencilMatrix m;
  m.layout_ = layout_;
  m.ni_ = ni_;
  m.nj_ = nj_;
  for (const auto& row : rows_) {
    for (const auto& e : row) {
      StencilOffset o{e.di, e.dj};
      if (std::find(m.offsets_.begin(), m.offsets_.end(), o) == m.offsets_.end()) {
        m.offsets_.push_back(o);
      }
    }
  }
  std::sort(m.offsets_.begin(), m.offsets_.end(), [](const StencilOffset& a, const StencilOffset& b) {
    return a.dj != b.dj ? a.dj < b.dj : a.di < b.di;
  });
  // Canonical order: ranks holding different offset sets still sum the
  // nonzero terms of a row in the same sequence.
  m.planes_.assign(m.offsets_.size(), std::vector<double>(rows_.size(), 0.0));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& e : rows_[r]) {
      auto k = static_cast<std::size_t>(
          std::find(m.offsets_.begin(), m.offsets_.end(), StencilOffset{e.di, e.dj}) -
          m.offsets_.begin());
      m.planes_[k][r] = e.value;
    }
  }
  int radius = 0;
  for (const auto& o : m.offsets_) radius = std::max({radius, std::abs(o.di), std::abs(o.dj)});
  // Ghost widths of the vectors follow the radius, so all ranks must agree.
  m.radius_ = static_cast<int>(layout_->comm().max(radius));
  rows_.clear();
  seen_.clear();
  return m;
}

StencilMatrix assemble(LayoutPtr layout, int max_radius,
                       const std::function<void(int, int, std::vector<StencilEntry>&)>& row_fn) {
  StencilAssembler a(layout, max_radius);
  const Subdomain& s = layout->sub();
  std::vector<StencilEntry> entries;
  for (int j = 0; j < s.nj(); ++j) {
    for (int i = 0; i < s.ni(); ++i) {
      entries.clear();
      row_fn(i, j, entries);
      a.set_row(i, j, entries);
    }
  }
  return a.finish();
}

void StencilRow::add(int di, int dj, double value) {
  int target = gj_ + dj;
  if (target < 0) target = -target;
  if (target > ny_ - 1) target = 2 * (ny_ - 1) - target;
  dj = target - gj_;
  for (auto& e : entries_) {
    if (e.di == di && e.dj == dj) {
      e.value += value;
      return;
    }
  }
  entries_.push_back({di, dj, value});
}

void StencilRow::add_row(const StencilRow& other, int di_shift, int dj_shift, double scale) {
  for (const auto& e : other.entries_) add(e.di + di_shift, e.dj + dj_shift, scale * e.value);
}

void matvec(const StencilMatrix& a, Field& x, Field& y) {
  if (x.ghost() < a.radius()) throw ContractError("matvec: x ghost width below stencil radius");
  halo_exchange(x);
  const auto& k = kernels::active();
  const auto offsets = a.offsets();
  const std::size_t terms = offsets.size();
  std::vector<const double*> coef(terms), xs(terms);
  for (int j = 0; j < y.nj(); ++j) {
    for (std::size_t t = 0; t < terms; ++t) {
      coef[t] = a.plane_row(t, j);
      xs[t] = x.row(j + offsets[t].dj) + offsets[t].di;
    }
    k.stencil_row(y.row(j), coef.data(), xs.data(), terms, static_cast<std::size_t>(y.ni()));
  }
}

}  // namespace biofilm
