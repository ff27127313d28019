#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace biofilm {

/// Message-passing endpoint for one rank. Ranks share nothing but what goes
/// through this interface; every collective must be entered by all ranks in
/// the same order.
class Comm {
 public:
  virtual ~Comm() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;

  // Point-to-point. send() never blocks on the receiver; recv() blocks until
  // the matching (source, tag) message arrives. Messages with equal
  // (source, tag) are delivered in send order.
  virtual void send(int dest, int tag, std::span<const double> data) = 0;
  virtual std::vector<double> recv(int source, int tag) = 0;

  /// Every rank's block, concatenated in rank order on every rank. All blocks
  /// must have the same length.
  virtual std::vector<double> allgather(std::span<const double> local) = 0;
  std::vector<double> allgather(double value) { return allgather(std::span<const double>(&value, 1)); }

  /// Concatenation of every rank's block (in rank order) on `root`; empty
  /// elsewhere.
  virtual std::vector<double> gatherv(std::span<const double> local, int root) = 0;

  virtual void broadcast(std::vector<double>& data, int root) = 0;
  virtual void barrier() = 0;

  // Reductions combine the gathered values in rank order, so the result is
  // bitwise reproducible for a fixed rank count.
  double sum(double local);
  /// Element-wise sum of equal-length blocks.
  std::vector<double> sum(std::span<const double> local);
  double max(double local);
  double min(double local);
  bool any(bool local);
};

/// Runs `body` once per rank on its own thread, each with a private Comm
/// backed by in-process mailboxes. After all threads have joined, rethrows
/// the lowest-ranked failure that is not a CommAborted, else the first
/// CommAborted.
void run_ranks(int ranks, const std::function<void(Comm&)>& body);

/// A single-rank communicator for serial work.
std::unique_ptr<Comm> make_self_comm();

#ifdef BIOFILM_HAVE_MPI
/// Wraps MPI_COMM_WORLD. MPI must already be initialized.
std::unique_ptr<Comm> make_mpi_comm();
#endif

}  // namespace biofilm
