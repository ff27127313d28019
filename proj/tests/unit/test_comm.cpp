#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "biofilm/comm.hpp"
#include "biofilm/errors.hpp"

using namespace biofilm;

TEST_CASE("self comm") {
  auto c = make_self_comm();
  CHECK(c->rank() == 0);
  CHECK(c->size() == 1);
  CHECK(c->sum(2.5) == 2.5);
  CHECK(c->any(true));
  CHECK_FALSE(c->any(false));
  std::vector<double> msg{1, 2, 3};
  c->send(0, 5, msg);
  CHECK(c->recv(0, 5) == msg);
  CHECK(c->gatherv(msg, 0) == msg);
}

TEST_CASE("thread ranks: collectives agree on every rank") {
  for (int n : {1, 2, 3, 4}) {
    CAPTURE(n);
    std::vector<double> sums(n), maxs(n), mins(n);
    std::vector<int> anys(n);
    std::vector<std::vector<double>> gathered(n);
    run_ranks(n, [&](Comm& c) {
      const int r = c.rank();
      sums[r] = c.sum(r + 1.0);
      maxs[r] = c.max(r == n - 1 ? 9.0 : 0.0);
      mins[r] = c.min(-r);
      anys[r] = c.any(r == n - 1);
      gathered[r] = c.allgather(10.0 * r);
      const double block[2] = {1.0 * r, -2.0};
      const std::vector<double> all = c.allgather(std::span<const double>(block, 2));
      REQUIRE(all.size() == 2u * n);
      for (int k = 0; k < n; ++k) CHECK(all[2 * k] == k);
      const std::vector<double> tot = c.sum(std::span<const double>(block, 2));
      CHECK(tot[0] == n * (n - 1) / 2.0);
      CHECK(tot[1] == -2.0 * n);
    });
    for (int r = 0; r < n; ++r) {
      CHECK(sums[r] == n * (n + 1) / 2.0);
      CHECK(maxs[r] == 9.0);
      CHECK(mins[r] == -(n - 1.0));
      CHECK(anys[r] == 1);
      REQUIRE(gathered[r].size() == static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) CHECK(gathered[r][k] == 10.0 * k);
    }
  }
}

TEST_CASE("thread ranks: point to point keeps order per tag") {
  run_ranks(3, [](Comm& c) {
    const int next = (c.rank() + 1) % 3, prev = (c.rank() + 2) % 3;
    std::vector<double> a{1.0 * c.rank()}, b{2.0 * c.rank()};
    c.send(next, 1, a);
    c.send(next, 1, b);
    c.send(next, 2, b);
    auto t2 = c.recv(prev, 2);
    auto first = c.recv(prev, 1);
    auto second = c.recv(prev, 1);
    CHECK(first[0] == 1.0 * prev);
    CHECK(second[0] == 2.0 * prev);
    CHECK(t2[0] == 2.0 * prev);
  });
}

TEST_CASE("thread ranks: gatherv and broadcast") {
  run_ranks(3, [](Comm& c) {
    std::vector<double> local(c.rank() + 1, c.rank());
    auto all = c.gatherv(local, 1);
    if (c.rank() == 1) {
      CHECK(all == std::vector<double>{0, 1, 1, 2, 2, 2});
    } else {
      CHECK(all.empty());
    }
    std::vector<double> data;
    if (c.rank() == 2) data = {4, 5};
    c.broadcast(data, 2);
    CHECK(data == std::vector<double>{4, 5});
    c.barrier();
  });
}

TEST_CASE("thread ranks: a failing rank releases its peers") {
  std::atomic<int> aborted{0};
  CHECK_THROWS_WITH_AS(run_ranks(3,
                                 [&](Comm& c) {
                                   if (c.rank() == 1) throw std::runtime_error("boom");
                                   try {
                                     c.barrier();
                                     c.recv(1, 3);
                                   } catch (const CommAborted&) {
                                     ++aborted;
                                     throw;
                                   }
                                 }),
                       "boom", std::runtime_error);
  CHECK(aborted.load() == 2);
}

TEST_CASE("reductions are reproducible for a fixed rank count") {
  std::vector<double> first, second;
  auto once = [](std::vector<double>& out) {
    std::vector<double> res(4);
    run_ranks(4, [&](Comm& c) { res[c.rank()] = c.sum(0.1 * (c.rank() + 1) + 1e-17 * c.rank()); });
    out = res;
  };
  once(first);
  once(second);
  CHECK(first == second);
}
