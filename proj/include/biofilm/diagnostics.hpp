#pragma once

#include <span>

#include "biofilm/mesh.hpp"

namespace biofilm {

/// Number of 4-connected clusters of {value >= threshold} in a global
/// (nxu x ny) row-major array, periodic in x.
int count_components(std::span<const double> global, int nxu, int ny, double threshold);

/// count_components over the gathered field; the answer is broadcast to every
/// rank. Collective.
int connected_components(const Field& phi, double threshold);

/// Narrowest total horizontal extent of {phi >= threshold} over the rows with
/// y_lo <= y <= y_hi. Collective.
double min_row_extent(const Field& phi, double threshold, double y_lo, double y_hi);

}  // namespace biofilm
