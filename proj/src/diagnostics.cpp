#include "biofilm/diagnostics.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace biofilm {

int count_components(std::span<const double> global, int nxu, int ny, double threshold) {
  const std::size_t n = static_cast<std::size_t>(nxu) * ny;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || !(global[start] >= threshold)) continue;
    ++count;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % nxu), j = static_cast<int>(k / nxu);
      const int ni[4] = {(i + 1) % nxu, (i + nxu - 1) % nxu, i, i};
      const int nj[4] = {j, j, j + 1, j - 1};
      for (int t = 0; t < 4; ++t) {
        if (nj[t] < 0 || nj[t] >= ny) continue;
        const std::size_t q = static_cast<std::size_t>(nj[t]) * nxu + ni[t];
        if (!seen[q] && global[q] >= threshold) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  return count;
}

int connected_components(const Field& phi, double threshold) {
  const GridSpec& g = phi.layout().grid();
  std::vector<double> global = gather_global(phi, 0);
  std::vector<double> result(1, 0.0);
  if (phi.layout().rank() == 0) {
    result[0] = count_components(global, g.unique_nx(), g.ny, threshold);
  }
  phi.layout().comm().broadcast(result, 0);
  return static_cast<int>(result[0]);
}

double min_row_extent(const Field& phi, double threshold, double y_lo, double y_hi) {
  const GridSpec& g = phi.layout().grid();
  std::vector<double> counts(static_cast<std::size_t>(g.ny), 0.0);
  for (int j = 0; j < phi.nj(); ++j)
    for (int i = 0; i < phi.ni(); ++i)
      if (phi(i, j) >= threshold) counts[static_cast<std::size_t>(phi.gj(j))] += 1.0;
  double best = std::numeric_limits<double>::infinity();
  Comm& comm = phi.layout().comm();
  for (int gj = 0; gj < g.ny; ++gj) {
    const double total = comm.sum(counts[static_cast<std::size_t>(gj)]);
    const double y = g.y(gj);
    if (y >= y_lo && y <= y_hi) best = std::min(best, total * g.dx);
  }
  return best;
}

}  // namespace biofilm
