#include "biofilm/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "biofilm/diagnostics.hpp"
#include "biofilm/errors.hpp"
#include "biofilm/output.hpp"

namespace biofilm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Diagnostics::csv_row() const {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", wall_ms);
  return std::to_string(step) + "," + fmt(time) + "," + fmt(mass_phi) + "," + fmt(free_energy) + "," +
         fmt(max_div) + "," + fmt(phi_min) + "," + fmt(phi_max) + "," + fmt(nutrient_total) + "," +
         std::to_string(components) + "," + wall + "," + std::to_string(ch_iters) + "," +
         std::to_string(nut_iters) + "," + std::to_string(mom_iters) + "," + std::to_string(prs_iters);
}

Simulation::Simulation(const SimConfig& cfg, Comm& comm) : cfg_(cfg) {
  cfg_.validate();
  layout_ = make_layout(cfg_.grid, comm);
  InitialState init = build_initial_condition(cfg_.ic, layout_, cfg_.flow);
  phi_ = std::move(init.phi);
  c_ = std::move(init.c);
  flow_ = std::move(init.flow);
}

StepStats Simulation::step() {
  const auto start = Clock::now();
  StepStats stats;
  const double dt = cfg_.dt;
  StepResult ch = ch_step(phi_, flow_.v, c_.curr, cfg_.ch, dt, cfg_.solver.ch);
  StepResult nut = nutrient_step(c_, phi_, ch.field, flow_.v, cfg_.nutrient, dt, cfg_.solver.nutrient);
  FlowState next = flow_;
  stats.flow = flow_step(next, phi_, ch.field, cfg_.flow, dt, cfg_.solver.momentum, cfg_.solver.pressure);
  flow_ = std::move(next);
  phi_.advance(ch.field);
  c_.advance(nut.field);
  stats.ch = ch.report;
  stats.nutrient = nut.report;
  ++step_;
  time_ += dt;
  stats.wall_ms = elapsed_ms(start);
  return stats;
}

Diagnostics Simulation::diagnostics(const StepStats* last) const {
  Diagnostics d;
  const GridSpec& g = layout_->grid();
  const double area = g.dx * g.dy;
  const Field& phi = phi_.curr;
  d.step = step_;
  d.time = time_;
  d.mass_phi = area * global_reduce(phi, Reduce::Sum);
  d.free_energy = free_energy(phi, cfg_.ch);
  d.max_div = max_interior_divergence(flow_.v);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Field solute(layout_, 0);
  for (int j = 0; j < phi.nj(); ++j) {
    for (int i = 0; i < phi.ni(); ++i) {
      lo = std::min(lo, phi(i, j));
      hi = std::max(hi, phi(i, j));
      solute(i, j) = (1.0 - phi(i, j)) * c_.curr(i, j);
    }
  }
  Comm& comm = layout_->comm();
  d.phi_min = comm.min(lo);
  d.phi_max = comm.max(hi);
  d.nutrient_total = area * global_reduce(solute, Reduce::Sum);
  d.components = connected_components(phi, 0.5 * cfg_.ic.phi_bulk);
  if (last) {
    d.wall_ms = last->wall_ms;
    d.ch_iters = last->ch.iterations;
    d.nut_iters = last->nutrient.iterations;
    d.mom_iters = last->flow.momentum_u.iterations + last->flow.momentum_v.iterations;
    d.prs_iters = last->flow.pressure.iterations;
  }
  return d;
}

void Simulation::write_snapshot(const std::string& path) const {
  char title[96];
  std::snprintf(title, sizeof title, "biofilm step %d time %.17g", step_, time_);
  write_vtk(path,
            {{"phi", &phi_.curr, 1.0},
             {"c", &c_.curr, 1.0},
             {"pressure", &flow_.p, 1.0 / cfg_.dt},
             {"u", &flow_.v.u, 1.0},
             {"v", &flow_.v.v, 1.0}},
            title);
}

int run(const SimConfig& cfg, Comm& comm, std::ostream& log) {
  const bool root = comm.rank() == 0;
  std::optional<Simulation> sim;
  try {
    sim.emplace(cfg, comm);
  } catch (const ConfigError& e) {
    if (root) log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::optional<CsvWriter> csv;
  auto snapshot = [&] {
    char name[48];
    std::snprintf(name, sizeof name, "/snapshot_%06d.vtk", sim->steps_done());
    sim->write_snapshot(cfg.output.dir + name);
  };
  try {
    bool failed = false;
    std::string why;
    if (root) {
      try {
        ensure_directory(cfg.output.dir);
        csv.emplace(cfg.output.dir + "/diagnostics.csv", kDiagnosticsHeader);
      } catch (const IoError& e) {
        failed = true;
        why = e.what();
      }
    }
    if (comm.any(failed)) throw IoError(root ? why : "output setup failed on rank 0");

    auto record = [&](const StepStats* stats) {
      Diagnostics d = sim->diagnostics(stats);
      if (root) csv->row(d.csv_row());
      return d;
    };
    record(nullptr);
    if (cfg.output.interval > 0) snapshot();
    for (int n = 0; n < cfg.steps; ++n) {
      StepStats stats;
      try {
        stats = sim->step();
      } catch (const StepError& e) {
        if (root) log << "step " << sim->steps_done() + 1 << ": " << e.what() << '\n';
        return kExitSolver;
      } catch (const DomainError& e) {
        if (root) log << "step " << sim->steps_done() + 1 << ": " << e.what() << '\n';
        return kExitSolver;
      } catch (const CoefficientError& e) {
        if (root) log << "step " << sim->steps_done() + 1 << ": " << e.what() << '\n';
        return kExitSolver;
      }
      Diagnostics d = record(&stats);
      if (root) {
        log << "step " << d.step << " t=" << d.time << " mass=" << d.mass_phi << " E=" << d.free_energy
            << " div=" << d.max_div << " comps=" << d.components << " iters=" << d.ch_iters << "/"
            << d.nut_iters << "/" << d.mom_iters << "/" << d.prs_iters << '\n';
      }
      if (cfg.output.interval > 0 && sim->steps_done() % cfg.output.interval == 0) snapshot();
    }
  } catch (const IoError& e) {
    if (root) log << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

GlobalFields run_gathered(const SimConfig& cfg, int ranks) {
  GlobalFields out;
  run_ranks(ranks, [&](Comm& comm) {
    Simulation sim(cfg, comm);
    std::vector<std::vector<int>> iters;
    for (int n = 0; n < cfg.steps; ++n) {
      StepStats s = sim.step();
      iters.push_back({s.ch.iterations, s.nutrient.iterations, s.flow.momentum_u.iterations,
                       s.flow.momentum_v.iterations, s.flow.pressure.iterations});
    }
    auto phi = gather_global(sim.phi());
    auto c = gather_global(sim.c());
    auto u = gather_global(sim.flow().v.u);
    auto v = gather_global(sim.flow().v.v);
    auto p = gather_global(sim.flow().p);
    if (comm.rank() == 0) {
      out = {std::move(phi), std::move(c), std::move(u), std::move(v), std::move(p), std::move(iters)};
    }
  });
  return out;
}

SerialCheckReport serial_check(const SimConfig& cfg) {
  SerialCheckReport report;
  report.ranks = cfg.ranks;
  const GlobalFields serial = run_gathered(cfg, 1);
  const GlobalFields parallel = run_gathered(cfg, cfg.ranks);
  auto diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = std::fabs(a[k] - b[k]);
      m = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(m, d);
    }
    return m;
  };
  report.max_difference = std::max({diff(serial.phi, parallel.phi), diff(serial.c, parallel.c),
                                    diff(serial.u, parallel.u), diff(serial.v, parallel.v),
                                    diff(serial.p, parallel.p)});
  report.iterations_match = serial.iterations == parallel.iterations;
  return report;
}

std::string ScalingRow::csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%d,%d,%.6f,%.6f,%.6f", ranks, grid, steps, wall_ms_per_step, speedup,
                efficiency);
  return buf;
}

std::vector<ScalingRow> scaling_harness(const SimConfig& base, std::ostream* log) {
  std::vector<ScalingRow> rows;
  std::vector<int> ranks = base.scaling.ranks;
  std::sort(ranks.begin(), ranks.end());
  for (int n : base.scaling.grids) {
    SimConfig cfg = base;
    cfg.grid = GridSpec::from_intervals(n);
    cfg.steps = base.scaling.steps;
    double reference = 0.0;
    for (int r : ranks) {
      double per_step = 0.0;
      run_ranks(r, [&](Comm& comm) {
        Simulation sim(cfg, comm);
        comm.barrier();
        const auto start = Clock::now();
        for (int s = 0; s < cfg.steps; ++s) sim.step();
        comm.barrier();
        const double ms = elapsed_ms(start);
        if (comm.rank() == 0) per_step = ms / cfg.steps;
      });
      ScalingRow row{r, n, cfg.steps, per_step, 1.0, 1.0};
      if (r == ranks.front()) reference = per_step * r;
      row.speedup = reference / (per_step * ranks.front());
      row.efficiency = reference / (per_step * r);
      if (log) *log << row.csv_row() << '\n';
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace biofilm
