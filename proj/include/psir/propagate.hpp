#pragma once

#include <vector>

#include "psir/grid.hpp"
#include "psir/phase.hpp"

namespace psir {

/// Angular-spectrum transfer of one plane slice from plane.z to target_z.
/// Zero-extends the data by pad_factor per axis, multiplies each propagating
/// mode (k1^2 + k2^2 < k^2) by exp(+i k3 (target_z - plane.z)), zeroes
/// evanescent modes, and crops back. pad_factor = 1 keeps the periodic
/// transform (used by the exact plane-wave identities).
std::vector<cdouble> angular_spectrum(const PlaneGrid& plane,
                                      const std::vector<cdouble>& values,
                                      double target_z, double k, int pad_factor = 2);

/// p1 = [propagate(target_z + eps) - propagate(target_z - eps)] / (2 eps).
std::vector<cdouble> normal_derivative(const PlaneGrid& plane,
                                       const std::vector<cdouble>& values,
                                       double target_z, double k, double eps,
                                       int pad_factor = 2);

/// Bilinear resample of plane data onto the (x1, x2) nodes of the grid's top
/// face. The plane and the grid must cover the same transverse extent.
std::vector<cdouble> resample_to_face(const PlaneGrid& plane,
                                      const std::vector<cdouble>& values,
                                      const Grid3& grid);

/// Boundary data on all of the grid box: p on the top face {x3 = max},
/// exp(i k x3) on the rest. Interior entries are zero.
ComplexField3 complement(const std::vector<cdouble>& p_top_face, double k, const Grid3& grid);

}  // namespace psir
