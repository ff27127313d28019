#include <mpi.h>

#include <list>

#include "biofilm/comm.hpp"
#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

class MpiComm final : public Comm {
 public:
  MpiComm() {
    MPI_Comm_rank(MPI_COMM_WORLD, &rank_);
    MPI_Comm_size(MPI_COMM_WORLD, &size_);
  }

  int rank() const override { return rank_; }
  int size() const override { return size_; }

  void send(int dest, int tag, std::span<const double> data) override {
    auto& msg = pending_.emplace_back();
    msg.data.assign(data.begin(), data.end());
    MPI_Isend(msg.data.data(), static_cast<int>(msg.data.size()), MPI_DOUBLE, dest, tag,
              MPI_COMM_WORLD, &msg.request);
    reap();
  }

  std::vector<double> recv(int source, int tag) override {
    MPI_Status status;
    MPI_Probe(source, tag, MPI_COMM_WORLD, &status);
    int count = 0;
    MPI_Get_count(&status, MPI_DOUBLE, &count);
    std::vector<double> out(count);
    MPI_Recv(out.data(), count, MPI_DOUBLE, source, tag, MPI_COMM_WORLD, MPI_STATUS_IGNORE);
    return out;
  }

  using Comm::allgather;
  std::vector<double> allgather(std::span<const double> local) override {
    const int n = static_cast<int>(local.size());
    std::vector<double> out(local.size() * static_cast<std::size_t>(size_));
    MPI_Allgather(local.data(), n, MPI_DOUBLE, out.data(), n, MPI_DOUBLE, MPI_COMM_WORLD);
    return out;
  }

  std::vector<double> gatherv(std::span<const double> local, int root) override {
    int n = static_cast<int>(local.size());
    std::vector<int> counts(size_), displs(size_);
    MPI_Gather(&n, 1, MPI_INT, counts.data(), 1, MPI_INT, root, MPI_COMM_WORLD);
    std::vector<double> out;
    if (rank_ == root) {
      int total = 0;
      for (int r = 0; r < size_; ++r) {
        displs[r] = total;
        total += counts[r];
      }
      out.resize(total);
    }
    MPI_Gatherv(local.data(), n, MPI_DOUBLE, out.data(), counts.data(), displs.data(),
                MPI_DOUBLE, root, MPI_COMM_WORLD);
    return out;
  }

  void broadcast(std::vector<double>& data, int root) override {
    long n = static_cast<long>(data.size());
    MPI_Bcast(&n, 1, MPI_LONG, root, MPI_COMM_WORLD);
    data.resize(n);
    MPI_Bcast(data.data(), static_cast<int>(n), MPI_DOUBLE, root, MPI_COMM_WORLD);
  }

  void barrier() override { MPI_Barrier(MPI_COMM_WORLD); }

  ~MpiComm() override {
    for (auto& msg : pending_) MPI_Wait(&msg.request, MPI_STATUS_IGNORE);
  }

 private:
  struct Outgoing {
    std::vector<double> data;
    MPI_Request request = MPI_REQUEST_NULL;
  };

  void reap() {
    for (auto it = pending_.begin(); it != pending_.end();) {
      int done = 0;
      MPI_Test(&it->request, &done, MPI_STATUS_IGNORE);
      it = done ? pending_.erase(it) : std::next(it);
    }
  }

  int rank_ = 0;
  int size_ = 1;
  std::list<Outgoing> pending_;
};

}  // namespace

std::unique_ptr<Comm> make_mpi_comm() { return std::make_unique<MpiComm>(); }

}  // namespace biofilm
