#pragma once

#include <array>
#include <vector>

#include "psir/grid.hpp"

namespace psir {

/// One smooth microsphere: n^2 contribution amplitude * psi((x - center)/r).
struct MicrosphereSpec {
    std::array<double, 3> center{0, 0, 0};  // scaled units, centers on {x3 = 0}
    double radius = 0.45;
    double amplitude = 1.04;  // peak of n^2 - 1
};

struct PhantomSpec {
    std::vector<MicrosphereSpec> spheres;
};

/// Smooth compactly supported bump: exp(-|x|^2/(1-|x|^2)) for |x| < 1, else 0.
double bump(double x1, double x2, double x3);

/// n^2(x) = 1 + sum amplitude * psi((x - center)/r) sampled on the grid.
/// Throws if any sphere support reaches outside the grid bbox. Spheres whose
/// centers are closer than the radius-0.45-class separation rule only warn.
RealField3 build_refractive_field(const PhantomSpec& spec, const Grid3& grid);

enum class PresetCase { one_sphere, two_spheres };

struct Preset {
    PhantomSpec phantom;
    Grid3 omega;               // reconstruction domain grid
    PlaneGrid measurement;     // P_meas at x3 = R
    WavenumberPartition band;  // k_scale * [108.3, 119.7]
    double gamma_z = 0.7;      // x3 level of the top face
    double R = 49.5;           // measurement plane level
    double n0 = 1.5;           // background index used for reporting
};

/// Experiment geometry: P_meas half-width 3.75 at x3 = 49.5, Gamma at
/// x3 = 0.7, Omega = (-3.75,3.75)^2 x (-6.8, 0.7), radius-0.45 spheres on
/// {x3 = 0}. Omega grid resolution comes from omega_ppw at the scaled top
/// wavenumber (no memory budget enforcement here; callers allocate).
Preset paper_preset(PresetCase which, double k_scale, int n_intervals = 10,
                    double omega_ppw = 4.0);

}  // namespace psir
