#include "biofilm/initial.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace biofilm {

namespace {

// 1 well inside, 0 well outside, for a signed distance d (negative inside).
double smooth_inside(double d, double width) { return 0.5 * (1.0 - std::tanh(d / width)); }

// Horizontal distance on the periodic unit interval.
double periodic_dx(double a, double b) {
  double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

double initial_phi(const InitialCondition& ic, double x, double y) {
  const double w = ic.smoothing;
  switch (ic.variant) {
    case IcVariant::UniformPerturbed:
      return ic.uniform_value;
    case IcVariant::BaseLayer:
      return ic.phi_bulk * smooth_inside(y - ic.base_height, w);
    case IcVariant::MushroomPair:
      break;
  }
  double bulk = smooth_inside(y - ic.base_height, w);
  double neck = 0.0;
  for (double cx : {ic.cap1_x, ic.cap2_x}) {
    const double dx = periodic_dx(x, cx);
    const double r = std::hypot(dx, y - ic.cap_y);
    bulk = std::max(bulk, smooth_inside(r - ic.cap_radius, w));
    // Stem from inside the base layer up to the cap centre.
    const double across = dx - 0.5 * ic.neck_width;
    const double along = std::max(0.5 * ic.base_height - y, y - ic.cap_y);
    neck = std::max(neck, smooth_inside(across, w) * smooth_inside(along, w));
  }
  return std::max(ic.phi_bulk * bulk, ic.phi_neck * neck);
}

InitialState build_initial_condition(const InitialCondition& ic, const LayoutPtr& layout,
                                     const FlowParams& fp) {
  InitialState s;
  Field phi(layout, 2);
  if (ic.variant == IcVariant::UniformPerturbed) {
    // Drawn in global order on every rank so the field does not depend on
    // the decomposition.
    const GridSpec& g = layout->grid();
    std::mt19937_64 rng(ic.seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::vector<double> global(g.unique_nodes());
    for (double& v : global) v = ic.uniform_value + ic.amplitude * noise(rng);
    scatter_global(phi, global);
  } else {
    assign(phi, [&](double x, double y) { return initial_phi(ic, x, y); });
  }
  update_ghosts(phi);
  s.phi = {phi, phi};

  Field c(layout, 1);
  c.fill(ic.c_init);
  s.c = {c, c};
  s.flow = FlowState::quiescent(layout, fp);
  return s;
}

}  // namespace biofilm
