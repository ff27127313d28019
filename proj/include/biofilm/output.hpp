#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "biofilm/mesh.hpp"

namespace biofilm {

struct VtkArray {
  std::string name;
  const Field* field;
  double scale = 1.0;
};

/// Writes a legacy ASCII STRUCTURED_POINTS file of nx x ny x 1 points (the
/// periodic seam column is written twice so the file covers the closed unit
/// square). Rank 0 writes; others only send their blocks. Throws IoError on
/// every rank when the file cannot be written. Collective.
void write_vtk(const std::string& path, const std::vector<VtkArray>& arrays, const std::string& title);

struct VtkData {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0;
  std::map<std::string, std::vector<double>> arrays;
};

/// Parses a file written by write_vtk. Throws IoError.
VtkData read_vtk(const std::string& path);

inline constexpr const char* kDiagnosticsHeader =
    "step,time,mass_phi,free_energy,max_div,phi_min,phi_max,nutrient_total,components,wall_ms,"
    "ch_iters,nut_iters,mom_iters,prs_iters";

inline constexpr const char* kScalingHeader = "ranks,grid,steps,wall_ms_per_step,speedup,efficiency";

/// Append-only CSV stream with a fixed header. Throws IoError.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  void row(const std::string& line);

 private:
  std::ofstream out_;
  std::string path_;
};

/// Creates `dir` (and parents). Throws IoError.
void ensure_directory(const std::string& dir);

}  // namespace biofilm
