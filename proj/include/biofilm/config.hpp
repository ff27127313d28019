#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biofilm/flow.hpp"
#include "biofilm/linsolve.hpp"
#include "biofilm/mesh.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

enum class Mode { Simulate, Scaling, SerialCheck };

enum class IcVariant { UniformPerturbed, BaseLayer, MushroomPair };

struct InitialCondition {
  IcVariant variant = IcVariant::MushroomPair;
  double base_height = 0.2;
  // Below the spinodal (0.211), so the colony does not densify toward phi = 1
  // and starve the solvent fraction.
  double phi_bulk = 0.2;
  double phi_neck = 0.15;
  double cap_radius = 0.1;
  double cap1_x = 0.3;
  double cap2_x = 0.7;
  double cap_y = 0.5;
  double neck_width = 0.06;
  double smoothing = 0.015;  // tanh interface width
  double uniform_value = 0.5;
  double amplitude = 0.01;
  std::uint64_t seed = 1;
  double c_init = 1.0;

  void validate() const;
};

struct SolverSet {
  SolverConfig ch;
  SolverConfig nutrient;
  SolverConfig momentum;
  SolverConfig pressure;
};

struct OutputConfig {
  std::string dir = "output";
  int interval = 0;  // snapshot every `interval` steps; 0 writes none
};

struct ScalingConfig {
  std::vector<int> ranks{1, 2, 4};
  std::vector<int> grids{256, 512};  // intervals per direction
  int steps = 10;
};

struct SimConfig {
  GridSpec grid = GridSpec::from_intervals(256);
  double dt = 1.0;
  int steps = 20;
  ChParams ch;
  NutrientParams nutrient;
  FlowParams flow;
  SolverSet solver;
  InitialCondition ic;
  OutputConfig output;
  Mode mode = Mode::Simulate;
  int ranks = 1;  // in-process ranks when not launched under MPI
  ScalingConfig scaling;

  SimConfig();
  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Parses flat `key = value` text (`#` starts a comment). Unknown keys and
/// malformed values throw ConfigError with `source:line:column`. The result
/// is validated.
SimConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a file. Throws IoError when unreadable.
SimConfig load_config(const std::string& path);

/// Sets one dotted key from its textual value. Throws ConfigError.
void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

}  // namespace biofilm
