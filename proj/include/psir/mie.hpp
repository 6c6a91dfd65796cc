#pragma once

#include <array>
#include <vector>

#include "psir/grid.hpp"

namespace psir {

struct MieResult {
    std::vector<cdouble> values;  // total field, one per target
    double tail_bound = 0;        // magnitude of the last partial-wave term
    int order = 0;                // truncation order used
};

/// Scalar partial-wave series for a homogeneous sphere of the given radius
/// centered at the origin, interior index n_inside, incident wave e^{i k x3}.
/// Targets must be exterior (|x| > radius). order <= 0 picks
/// ceil(k * radius) + 10 plus a curvature margin.
MieResult mie_reference(double radius, double n_inside, double k,
                        const std::vector<std::array<double, 3>>& targets, int order = 0);

}  // namespace psir
