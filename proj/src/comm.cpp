#include "biofilm/comm.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "biofilm/errors.hpp"

namespace biofilm {

double Comm::sum(double local) {
  double total = 0.0;
  for (double v : allgather(local)) total += v;
  return total;
}

std::vector<double> Comm::sum(std::span<const double> local) {
  const std::vector<double> all = allgather(local);
  std::vector<double> total(local.size(), 0.0);
  for (std::size_t k = 0; k < all.size(); ++k) total[k % local.size()] += all[k];
  return total;
}

double Comm::max(double local) {
  auto all = allgather(local);
  return *std::max_element(all.begin(), all.end());
}

double Comm::min(double local) {
  auto all = allgather(local);
  return *std::min_element(all.begin(), all.end());
}

bool Comm::any(bool local) { return max(local ? 1.0 : 0.0) > 0.0; }

namespace {

class World {
 public:
  explicit World(int n) : n_(n), slots_(n) {}

  int size() const { return n_; }

  void post(int src, int dst, int tag, std::vector<double> data) {
    std::lock_guard lk(mutex_);
    mail_[{src, dst, tag}].push_back(std::move(data));
    cv_.notify_all();
  }

  std::vector<double> take(int src, int dst, int tag) {
    std::unique_lock lk(mutex_);
    auto key = std::make_tuple(src, dst, tag);
    cv_.wait(lk, [&] {
      auto it = mail_.find(key);
      return aborted_ || (it != mail_.end() && !it->second.empty());
    });
    if (aborted_) throw CommAborted("peer rank failed");
    auto& queue = mail_[key];
    std::vector<double> out = std::move(queue.front());
    queue.pop_front();
    return out;
  }

  void barrier() {
    std::unique_lock lk(mutex_);
    if (aborted_) throw CommAborted("peer rank failed");
    long gen = generation_;
    if (++arrived_ == n_) {
      arrived_ = 0;
      ++generation_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lk, [&] { return generation_ != gen || aborted_; });
    if (generation_ == gen) throw CommAborted("peer rank failed");
  }

  void abort() {
    std::lock_guard lk(mutex_);
    aborted_ = true;
    cv_.notify_all();
  }

  // Slots are written between two barriers by their owning rank only.
  std::vector<std::vector<double>>& slots() { return slots_; }

 private:
  int n_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::tuple<int, int, int>, std::deque<std::vector<double>>> mail_;
  std::vector<std::vector<double>> slots_;
  int arrived_ = 0;
  long generation_ = 0;
  bool aborted_ = false;
};

class ThreadComm final : public Comm {
 public:
  ThreadComm(World& world, int rank) : world_(world), rank_(rank) {}

  int rank() const override { return rank_; }
  int size() const override { return world_.size(); }

  void send(int dest, int tag, std::span<const double> data) override {
    world_.post(rank_, dest, tag, std::vector<double>(data.begin(), data.end()));
  }

  std::vector<double> recv(int source, int tag) override {
    return world_.take(source, rank_, tag);
  }

  using Comm::allgather;
  std::vector<double> allgather(std::span<const double> local) override {
    world_.slots()[rank_].assign(local.begin(), local.end());
    world_.barrier();
    std::vector<double> out;
    out.reserve(local.size() * static_cast<std::size_t>(size()));
    for (const auto& s : world_.slots()) out.insert(out.end(), s.begin(), s.end());
    world_.barrier();
    return out;
  }

  std::vector<double> gatherv(std::span<const double> local, int root) override {
    world_.slots()[rank_].assign(local.begin(), local.end());
    world_.barrier();
    std::vector<double> out;
    if (rank_ == root) {
      for (const auto& s : world_.slots()) out.insert(out.end(), s.begin(), s.end());
    }
    world_.barrier();
    return out;
  }

  void broadcast(std::vector<double>& data, int root) override {
    if (rank_ == root) world_.slots()[root] = data;
    world_.barrier();
    if (rank_ != root) data = world_.slots()[root];
    world_.barrier();
  }

  void barrier() override { world_.barrier(); }

 private:
  World& world_;
  int rank_;
};

class SelfComm final : public Comm {
 public:
  int rank() const override { return 0; }
  int size() const override { return 1; }

  void send(int dest, int tag, std::span<const double> data) override {
    if (dest != 0) throw ContractError("SelfComm: send to rank " + std::to_string(dest));
    mail_[tag].emplace_back(data.begin(), data.end());
  }

  std::vector<double> recv(int source, int tag) override {
    auto& q = mail_[tag];
    if (source != 0 || q.empty()) throw ContractError("SelfComm: recv with no matching send");
    auto out = std::move(q.front());
    q.pop_front();
    return out;
  }

  using Comm::allgather;
  std::vector<double> allgather(std::span<const double> local) override { return {local.begin(), local.end()}; }
  std::vector<double> gatherv(std::span<const double> local, int) override {
    return {local.begin(), local.end()};
  }
  void broadcast(std::vector<double>&, int) override {}
  void barrier() override {}

 private:
  std::map<int, std::deque<std::vector<double>>> mail_;
};

}  // namespace

void run_ranks(int ranks, const std::function<void(Comm&)>& body) {
  if (ranks < 1) throw ContractError("run_ranks: need at least one rank");
  if (ranks == 1) {
    SelfComm comm;
    body(comm);
    return;
  }
  World world(ranks);
  std::vector<std::exception_ptr> errors(ranks);
  std::vector<std::thread> threads;
  threads.reserve(ranks);
  for (int r = 0; r < ranks; ++r) {
    threads.emplace_back([&, r] {
      ThreadComm comm(world, r);
      try {
        body(comm);
      } catch (...) {
        errors[r] = std::current_exception();
        world.abort();
      }
    });
  }
  for (auto& t : threads) t.join();

  // Prefer the root cause over the CommAborted echoes it triggered.
  std::exception_ptr aborted;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CommAborted&) {
      if (!aborted) aborted = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (aborted) std::rethrow_exception(aborted);
}

std::unique_ptr<Comm> make_self_comm() { return std::make_unique<SelfComm>(); }

}  // namespace biofilm
