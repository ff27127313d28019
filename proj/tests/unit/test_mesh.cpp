#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "biofilm/errors.hpp"
#include "biofilm/mesh.hpp"
#include "support.hpp"

using namespace biofilm;

TEST_CASE("grid spacing and periodic column") {
  GridSpec g = GridSpec::from_nodes(5, 9);
  CHECK(g.unique_nx() == 4);
  CHECK(g.unique_nodes() == 36u);
  CHECK(g.dx == doctest::Approx(0.25));
  CHECK(g.dy == doctest::Approx(0.125));
  GridSpec h = GridSpec::from_intervals(64);
  CHECK(h.nx == 65);
  CHECK(h.dx == 1.0 / 64);
  CHECK_THROWS_AS(GridSpec::from_nodes(3, 8), ContractError);
}

TEST_CASE("decompose: small examples") {
  GridSpec g = GridSpec::from_nodes(4, 4);
  Decomposition one = decompose(g, 1);
  REQUIRE(one.parts.size() == 1);
  CHECK(one.parts[0].ni() == 3);
  CHECK(one.parts[0].nj() == 4);
  CHECK(one.parts[0].bottom_wall());
  CHECK(one.parts[0].top_wall());

  Decomposition two = decompose(g, 2);
  REQUIRE(two.parts.size() == 2);
  CHECK(two.px * two.py == 2);
  CHECK(two.parts[0].ni() * two.parts[0].nj() + two.parts[1].ni() * two.parts[1].nj() == 12);

  Decomposition four = decompose(GridSpec::from_nodes(9, 9), 4);
  CHECK(four.px == 2);
  CHECK(four.py == 2);

  CHECK_THROWS_AS(decompose(g, 0), DecompositionError);
  CHECK_THROWS_AS(decompose(g, 7), DecompositionError);
}

TEST_CASE("decompose: tiling by brute force") {
  for (int nx : {4, 9, 17, 30}) {
    for (int ny : {4, 8, 13}) {
      for (int ranks = 1; ranks <= 8; ++ranks) {
        GridSpec g = GridSpec::from_nodes(nx, ny);
        Decomposition d;
        try {
          d = decompose(g, ranks);
        } catch (const DecompositionError&) {
          continue;
        }
        CAPTURE(nx);
        CAPTURE(ny);
        CAPTURE(ranks);
        CHECK(d.px * d.py == ranks);
        std::vector<int> owner(g.unique_nodes(), -1);
        int min_ni = 1 << 30, max_ni = 0, min_nj = 1 << 30, max_nj = 0;
        for (const Subdomain& s : d.parts) {
          min_ni = std::min(min_ni, s.ni());
          max_ni = std::max(max_ni, s.ni());
          min_nj = std::min(min_nj, s.nj());
          max_nj = std::max(max_nj, s.nj());
          for (int j = s.j_lo; j < s.j_hi; ++j)
            for (int i = s.i_lo; i < s.i_hi; ++i) {
              CHECK(owner[j * g.unique_nx() + i] == -1);
              owner[j * g.unique_nx() + i] = s.rank;
            }
          CHECK(s.bottom_wall() == (s.j_lo == 0));
          CHECK(s.top_wall() == (s.j_hi == ny));
        }
        for (int o : owner) CHECK(o >= 0);
        CHECK(max_ni - min_ni <= 1);
        CHECK(max_nj - min_nj <= 1);
        // nearest-square choice
        for (int px = 1; px <= ranks; ++px) {
          if (ranks % px) continue;
          const int py = ranks / px;
          if (px > g.unique_nx() || py > ny) continue;
          CHECK(std::abs(d.px - d.py) <= std::abs(px - py));
        }
      }
    }
  }
}

TEST_CASE("fill_physical_ghosts: mirror and dirichlet") {
  support::Serial s(6, 8);
  Field phi(s.layout, 2);
  assign(phi, [](double, double y) { return y; });
  for (int i = 0; i < phi.ni(); ++i) {
    phi(i, 1) = 3.0;
    phi(i, 2) = 7.0;
  }
  fill_physical_ghosts(phi);
  for (int i = 0; i < phi.ni(); ++i) {
    CHECK(phi(i, -1) == 3.0);
    CHECK(phi(i, -2) == 7.0);
    CHECK(phi(i, 8) == phi(i, 6));
    CHECK(phi(i, 9) == phi(i, 5));
  }
  Field twice = phi;
  fill_physical_ghosts(twice);
  for (std::size_t k = 0; k < phi.raw().size(); ++k) CHECK(twice.raw()[k] == phi.raw()[k]);

  Field c(s.layout, 1);
  for (int i = 0; i < c.ni(); ++i) c(i, 1) = 5.0;
  fill_physical_ghosts(c);
  for (int i = 0; i < c.ni(); ++i) CHECK(c(i, -1) == 5.0);

  Field u(s.layout, 1, GhostPolicy::dirichlet(0.0), GhostPolicy::dirichlet(0.1));
  u.fill(3.0);
  fill_physical_ghosts(u);
  for (int i = 0; i < u.ni(); ++i) {
    CHECK(u(i, 0) == 0.0);
    CHECK(u(i, -1) == 0.0);
    CHECK(u(i, 7) == 0.1);
    CHECK(u(i, 8) == 0.1);
    CHECK(u(i, 3) == 3.0);
  }

  Field none(s.layout, 1, GhostPolicy::none(), GhostPolicy::none());
  CHECK_THROWS_AS(fill_physical_ghosts(none), ContractError);
}

TEST_CASE("halo_exchange: single-rank periodic wrap") {
  support::Serial s(7, 5);
  Field f(s.layout, 2);
  for (int j = 0; j < f.nj(); ++j)
    for (int i = 0; i < f.ni(); ++i) f(i, j) = i;
  halo_exchange(f);
  for (int j = 0; j < f.nj(); ++j) {
    CHECK(f(-1, j) == 5);
    CHECK(f(-2, j) == 4);
    CHECK(f(6, j) == 0);
    CHECK(f(7, j) == 1);
  }
  Field k(s.layout, 1);
  k.fill(2.0);
  update_ghosts(k);
  for (double v : k.raw()) CHECK(v == 2.0);
}

namespace {

// Whole padded array of every rank's field, keyed by global (i, j), for a
// field built from a global function.
std::vector<std::vector<double>> padded_views(int ranks, const GridSpec& g, int ghost) {
  const support::Index idx(g);
  std::vector<std::vector<double>> out(ranks);
  run_ranks(ranks, [&](Comm& comm) {
    LayoutPtr layout = make_layout(g, comm);
    Field f(layout, ghost);
    for (int j = 0; j < f.nj(); ++j)
      for (int i = 0; i < f.ni(); ++i) f(i, j) = std::sin(1.0 + f.gi(i)) + 0.1 * f.gj(j) * f.gj(j);
    update_ghosts(f);
    // Check every ghost against the analytic periodic/mirror image.
    std::vector<double> bad;
    for (int j = -ghost; j < f.nj() + ghost; ++j) {
      for (int i = -ghost; i < f.ni() + ghost; ++i) {
        const int gi = idx.wrap(f.gi(i));
        const int gj = idx.reflect(f.gj(j));
        const double expect = std::sin(1.0 + gi) + 0.1 * gj * gj;
        if (f(i, j) != expect) bad.push_back(1.0);
      }
    }
    out[comm.rank()] = bad;
  });
  return out;
}

}  // namespace

TEST_CASE("halo_exchange: ghosts equal the global periodic/mirror image on any decomposition") {
  for (int ranks : {1, 2, 3, 4, 6}) {
    for (int ghost : {1, 2}) {
      CAPTURE(ranks);
      CAPTURE(ghost);
      auto bad = padded_views(ranks, GridSpec::from_nodes(13, 12), ghost);
      for (const auto& b : bad) CHECK(b.empty());
    }
  }
}

TEST_CASE("halo_exchange: mismatched ghost widths are caught") {
  CHECK_THROWS_AS(run_ranks(2,
                            [](Comm& comm) {
                              LayoutPtr layout = make_layout(GridSpec::from_nodes(9, 9), comm);
                              Field f(layout, comm.rank() == 0 ? 1 : 2);
                              halo_exchange(f);
                            }),
                  ContractError);
}

TEST_CASE("global_reduce") {
  support::Serial s(4, 4);
  Field f(s.layout, 1);
  f.fill(1.0);
  CHECK(global_reduce(f, Reduce::Sum) == 12.0);
  f.fill(0.0);
  CHECK(global_reduce(f, Reduce::Sum) == 0.0);
  CHECK(global_reduce(f, Reduce::Max) == 0.0);

  std::vector<double> maxs(3);
  run_ranks(3, [&](Comm& comm) {
    LayoutPtr layout = make_layout(GridSpec::from_nodes(10, 10), comm);
    Field g(layout, 1);
    if (comm.rank() == 2) g(0, 0) = 9.0;
    maxs[comm.rank()] = global_reduce(g, Reduce::Max);
  });
  for (double m : maxs) CHECK(m == 9.0);
}

TEST_CASE("global sums are identical on every decomposition") {
  const GridSpec g = GridSpec::from_nodes(33, 21);
  // Wide dynamic range and cancellation: naive partial sums differ here.
  auto fn = [](double x, double y) { return std::exp(20 * x) * std::cos(37 * y) + 1e-9 * std::sin(50 * x); };
  long double exact = 0.0L;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.unique_nx(); ++i) exact += static_cast<long double>(fn(i * g.dx, j * g.dy));
  std::vector<double> sums, dots;
  for (int ranks : {1, 2, 3, 4, 5}) {
    double result = 0.0, d = 0.0;
    run_ranks(ranks, [&](Comm& comm) {
      Field f(make_layout(g, comm), 1);
      assign(f, fn);
      const double s = global_reduce(f, Reduce::Sum);
      Field h = f.like();
      assign(h, [](double x, double y) { return std::sin(9 * x + y); });
      const double dd = global_sum(f, &h);
      if (comm.rank() == 0) result = s, d = dd;
    });
    sums.push_back(result);
    dots.push_back(d);
  }
  for (std::size_t k = 1; k < sums.size(); ++k) {
    CHECK(sums[k] == sums[0]);
    CHECK(dots[k] == dots[0]);
  }
  CHECK(std::fabs(sums[0] - static_cast<double>(exact)) <= 1e-15 * std::exp(20.0) * g.unique_nodes());

  support::Serial s(4, 4);
  Field z(s.layout, 1);
  CHECK(global_sum(z) == 0.0);
  z(1, 1) = 0.1;
  z(2, 2) = -0.03;
  const double want = 0.1 - 0.03;
  CHECK(std::fabs(global_sum(z) - want) <= std::nextafter(want, 1.0) - want);
}

TEST_CASE("gather and scatter round trip") {
  const GridSpec g = GridSpec::from_nodes(11, 9);
  std::vector<double> global(g.unique_nodes());
  for (std::size_t k = 0; k < global.size(); ++k) global[k] = 0.5 * k;
  run_ranks(4, [&](Comm& comm) {
    Field f(make_layout(g, comm), 1);
    scatter_global(f, global);
    for (int j = 0; j < f.nj(); ++j)
      for (int i = 0; i < f.ni(); ++i) CHECK(f(i, j) == 0.5 * (f.gj(j) * 10 + f.gi(i)));
    auto back = gather_global(f, 1);
    if (comm.rank() == 1) {
      CHECK(back == global);
    } else {
      CHECK(back.empty());
    }
  });
}
