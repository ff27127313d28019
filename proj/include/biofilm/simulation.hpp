#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "biofilm/config.hpp"
#include "biofilm/flow.hpp"
#include "biofilm/initial.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

struct StepStats {
  SolveReport ch;
  SolveReport nutrient;
  FlowReport flow;
  double wall_ms = 0.0;
};

struct Diagnostics {
  int step = 0;
  double time = 0.0;
  double mass_phi = 0.0;  // dx dy sum of phi_n
  double free_energy = 0.0;
  double max_div = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double nutrient_total = 0.0;  // dx dy sum of phi_s c
  int components = 0;
  double wall_ms = 0.0;
  int ch_iters = 0;
  int nut_iters = 0;
  int mom_iters = 0;
  int prs_iters = 0;

  /// One diagnostics.csv line (no newline), columns in header order.
  std::string csv_row() const;
};

/// The coupled time loop on one decomposition. Every member function that
/// touches fields is collective.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, Comm& comm);

  /// CH -> nutrient -> flow. Throws StepError, DomainError or
  /// CoefficientError; the state is then left at the last completed step.
  StepStats step();

  Diagnostics diagnostics(const StepStats* last) const;
  void write_snapshot(const std::string& path) const;

  const SimConfig& config() const { return cfg_; }
  const LayoutPtr& layout() const { return layout_; }
  const Field& phi() const { return phi_.curr; }
  const Field& c() const { return c_.curr; }
  const FlowState& flow() const { return flow_; }
  int steps_done() const { return step_; }
  double time() const { return time_; }

 private:
  SimConfig cfg_;
  LayoutPtr layout_;
  PhiHistory phi_;
  History c_;
  FlowState flow_;
  int step_ = 0;
  double time_ = 0.0;
};

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitIo = 3 };

/// Simulate mode: diagnostics.csv and optional snapshots in cfg.output.dir.
/// Returns an ExitCode; output written before a failure is kept. Collective.
int run(const SimConfig& cfg, Comm& comm, std::ostream& log);

struct GlobalFields {
  std::vector<double> phi, c, u, v, p;
  std::vector<std::vector<int>> iterations;  // per step: ch, nutrient, momentum u, v, pressure
};

/// Runs cfg.steps steps on `ranks` in-process ranks and returns the
/// gathered final fields.
GlobalFields run_gathered(const SimConfig& cfg, int ranks);

struct SerialCheckReport {
  int ranks = 1;
  double max_difference = 0.0;
  bool iterations_match = true;
};

/// Compares a 1-rank run with a cfg.ranks-rank run of the same config.
SerialCheckReport serial_check(const SimConfig& cfg);

struct ScalingRow {
  int ranks = 1;
  int grid = 0;
  int steps = 0;
  double wall_ms_per_step = 0.0;
  double speedup = 1.0;
  double efficiency = 1.0;

  std::string csv_row() const;
};

/// Times cfg.scaling.steps steps (no I/O) for every grid and rank count with
/// in-process ranks. Speedup is relative to the smallest rank count run for
/// the same grid.
std::vector<ScalingRow> scaling_harness(const SimConfig& cfg, std::ostream* log = nullptr);

}  // namespace biofilm
