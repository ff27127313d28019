#pragma once

#include "biofilm/config.hpp"
#include "biofilm/flow.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

struct InitialState {
  PhiHistory phi;  // ghost width 2, prev == curr
  History c;       // ghost width 1, prev == curr
  FlowState flow;
};

/// Network fraction of the initial condition at a point. Pure function of
/// (x, y), so every decomposition builds the same field; the perturbed
/// uniform variant is seeded per global node instead and is not covered.
double initial_phi(const InitialCondition& ic, double x, double y);

/// Builds phi^0 (= phi^-1), c = c_init and a quiescent flow with the lid
/// applied. Collective.
InitialState build_initial_condition(const InitialCondition& ic, const LayoutPtr& layout,
                                     const FlowParams& fp);

}  // namespace biofilm
