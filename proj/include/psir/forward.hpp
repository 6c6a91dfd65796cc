#pragma once

#include <vector>

#include "psir/fft.hpp"
#include "psir/grid.hpp"
#include "psir/phase.hpp"

namespace psir {

struct SolverSettings {
    double tolerance = 1e-6;
    int max_iterations = 500;
    double points_per_wavelength = 10.0;
};

struct ForwardSolution {
    double k = 0;
    ComplexField3 u;  // total field on the volume grid
    double residual = 0;
    int iterations = 0;
    bool converged = false;
};

/// Plane-wave e^{i k x3}.
cdouble incident(double x3, double k);

/// Solves u = u_inc + k^2 G_k[(n^2 - 1) u] by FFT convolution + BiCGStab.
/// Pass a cached convolver when re-solving on the same (grid, k).
ForwardSolution solve_ls(const RealField3& n2, double k, const SolverSettings& settings,
                         const GreenConvolver* convolver = nullptr);

/// Relative residual of u under the discrete Lippmann-Schwinger operator.
double ls_residual(const ForwardSolution& sol, const RealField3& n2,
                   const GreenConvolver& convolver);

/// Total field on an exterior plane by direct quadrature of the converged
/// volume field. Throws if the plane crosses the contrast support.
ComplexPlaneData evaluate_exterior(const ForwardSolution& sol, const RealField3& n2,
                                   const PlaneGrid& targets);

/// Far-field approximation of the scattered part, constant over the plane:
/// u_sc = (k^2 / 4 pi R) e^{ikR} integral e^{-ik xi3} (n^2 - 1) u dxi.
ComplexPlaneData far_field_plane(const ForwardSolution& sol, const RealField3& n2,
                                 const PlaneGrid& plane);

/// phi(k) = max over plane nodes of |u - u_inc|^2 for the slice at k.
double phi_of_k(const ComplexPlaneData& data, double k);

/// Smallness bound [count * k / (4 pi R)]^2.
double analytic_bound(double k, double R, int sphere_count);

/// Gradient of the total field on the volume grid via the integral
/// representation grad u = ik e3 e^{ikx3} + k^2 (grad G) * [(n^2 - 1) u].
/// Spectrally accurate in the carrier, unlike grid finite differences.
void solution_gradient(const ForwardSolution& sol, const RealField3& n2,
                       const GreenConvolver& convolver, std::vector<cdouble>& g1,
                       std::vector<cdouble>& g2, std::vector<cdouble>& g3);

/// First Born approximation on a plane: direct quadrature with u replaced by
/// the incident wave. Independent of the solver path.
ComplexPlaneData born_reference(const RealField3& n2, double k, const PlaneGrid& plane);

}  // namespace psir
