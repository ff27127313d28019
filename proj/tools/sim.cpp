// Command-line driver: simulate, strong-scaling benchmark, or a 1-rank vs
// n-rank consistency check.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "biofilm/errors.hpp"
#include "biofilm/output.hpp"
#include "biofilm/simulation.hpp"

#ifdef BIOFILM_HAVE_MPI
#include <mpi.h>
#endif

using namespace biofilm;

namespace {

int world_size() {
#ifdef BIOFILM_HAVE_MPI
  int size = 1;
  MPI_Comm_size(MPI_COMM_WORLD, &size);
  return size;
#else
  return 1;
#endif
}

int world_rank() {
#ifdef BIOFILM_HAVE_MPI
  int rank = 0;
  MPI_Comm_rank(MPI_COMM_WORLD, &rank);
  return rank;
#else
  return 0;
#endif
}

int simulate(const SimConfig& cfg) {
#ifdef BIOFILM_HAVE_MPI
  if (world_size() > 1) {
    auto comm = make_mpi_comm();
    return run(cfg, *comm, std::cout);
  }
#endif
  int status = kExitOk;
  run_ranks(cfg.ranks, [&](Comm& comm) {
    const int s = run(cfg, comm, std::cout);
    if (comm.rank() == 0) status = s;
  });
  return status;
}

int scaling(const SimConfig& cfg) {
  ensure_directory(cfg.output.dir);
  std::cout << kScalingHeader << '\n';
  auto rows = scaling_harness(cfg, &std::cout);
  CsvWriter csv(cfg.output.dir + "/scaling.csv", kScalingHeader);
  for (const auto& r : rows) csv.row(r.csv_row());
  return kExitOk;
}

int serialcheck(const SimConfig& cfg) {
  SerialCheckReport r = serial_check(cfg);
  const bool ok = r.max_difference <= 1e-8 && r.iterations_match;
  std::cout << "serialcheck ranks=" << r.ranks << " max_difference=" << r.max_difference
            << " iterations_match=" << (r.iterations_match ? "yes" : "no") << ' '
            << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitSolver;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Biofilm phase-field flow simulator"};
  std::string config_path, mode, output;
  int steps = 0, ranks = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--mode", mode, "simulate | scaling | serialcheck");
  app.add_option("--output", output, "output directory");
  app.add_option("--steps", steps, "number of time steps");
  app.add_option("--ranks", ranks, "in-process ranks when not launched under MPI");
  app.add_option("--override", overrides, "key=value, applied after the file")->take_all();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  SimConfig cfg;
  try {
    cfg = load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--override expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!mode.empty()) cfg.mode = parse_mode(mode);
    if (!output.empty()) cfg.output.dir = output;
    if (steps != 0) cfg.steps = steps;
    if (ranks != 0) cfg.ranks = ranks;
    cfg.validate();
  } catch (const ConfigError& e) {
    if (world_rank() == 0) std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    if (world_rank() == 0) std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    switch (cfg.mode) {
      case Mode::Simulate:
        return simulate(cfg);
      case Mode::Scaling:
        if (world_size() > 1) throw ConfigError("scaling mode runs its own ranks; launch it without mpirun");
        return scaling(cfg);
      case Mode::SerialCheck:
        if (world_size() > 1) throw ConfigError("serialcheck mode runs its own ranks; launch it without mpirun");
        return serialcheck(cfg);
    }
  } catch (const ConfigError& e) {
    if (world_rank() == 0) std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepError& e) {
    std::cerr << e.what() << '\n';
    return kExitSolver;
  } catch (const DomainError& e) {
    std::cerr << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef BIOFILM_HAVE_MPI
  MPI_Init(&argc, &argv);
#endif
  int status = dispatch(argc, argv);
#ifdef BIOFILM_HAVE_MPI
  if (status != kExitOk && world_size() > 1) MPI_Abort(MPI_COMM_WORLD, status);
  MPI_Finalize();
#endif
  return status;
}
