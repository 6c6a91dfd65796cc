#pragma once

#include <string>
#include <vector>

#include "psir/grid.hpp"
#include "psir/phase.hpp"

namespace psir {

/// Three complex component fields on one grid (x1-fastest layout).
struct VectorField3 {
    Grid3 grid;
    std::vector<cdouble> c1, c2, c3;

    VectorField3() = default;
    explicit VectorField3(const Grid3& g)
        : grid(g), c1(g.size(), 0.0), c2(g.size(), 0.0), c3(g.size(), 0.0) {}
};

struct AlgorithmSettings {
    // One sweep per interval: the inner refinement couples the coefficient
    // and the tail through the scattering resolvent with loop gain above one
    // at full scale, so extra sweeps amplify data error instead of reducing it.
    int inner_iterations = 1;
    double c_max = 6.0;           // upper clamp for the recovered coefficient
    double epsilon_p1 = 0;        // finite-difference step for d/dx3 on the plane; 0 = 1e-3/k_high
    int stop_window_start = 3;    // first interval eligible for the stopping rule
    // Angular-spectrum padding for the data transfer to the top face. 1 keeps
    // the periodic transform: the DC mode (and hence vacuum data) maps exactly,
    // which the window-diffracting zero-padded variant does not after the long
    // R -> Gamma haul.
    int pad_factor = 1;
    double n0 = 1.5;              // background index for the reported physical index
    double ls_tolerance = 1e-6;
    int ls_max_iterations = 500;
    double pde_tolerance = 1e-8;
    int pde_max_iterations = 2000;
};

struct ReconstructionResult {
    RealField3 c;        // spatially resolved coefficient c(x) = n_rel(x)^2, in [1, c_max]
    RealField3 n_rel;    // sqrt(c)
    double n_comp = 0;   // hot-spot physical index, n0 * max(n_rel)
    int n_star = 0;      // interval index selected by the stopping rule
    std::vector<double> change_history;  // relative L2 change per interval (index 1..N)
    std::vector<std::string> log;        // one JSON object per inner iterate
};

/// Tail gradient and its divergence: grad V with V = log u at k_high,
/// initialized from three Laplace solves with data-driven boundary values.
struct TailGradient {
    VectorField3 grad;
    std::vector<cdouble> div;
};

/// Boundary vector for the initial tail: grad p / p from the propagated data
/// on the top face, (0, 0, i k) from the incident wave elsewhere. Interior
/// entries are zero. `p_top` and `p1_top` are the field and its x3 derivative
/// resampled onto the grid's top face.
VectorField3 boundary_gradient(const Grid3& grid, const std::vector<cdouble>& p_top,
                               const std::vector<cdouble>& p1_top, double k);

/// Initial tail: each gradient component solves a Laplace problem with the
/// boundary vector as Dirichlet data; the divergence is formed afterwards.
TailGradient init_tail(const VectorField3& bdry, double pde_tolerance = 1e-8,
                       int pde_max_iterations = 2000);

/// Dirichlet data for q on interval n: log(p(k_{n-1})/p(k_n)) / (k_{n-1}-k_n)
/// on the top face (principal branch), i x3 on the other faces.
std::vector<cdouble> q_boundary(const Grid3& grid, const std::vector<cdouble>& p_top_prev,
                                const std::vector<cdouble>& p_top_cur, double k_prev,
                                double k_cur);

/// c(x) = clamp(Re(-(div grad_v + grad_v . grad_v) / k^2), 1, c_max).
RealField3 compute_c(const Grid3& grid, const VectorField3& grad_v, double k, double c_max);

/// Runs the layer-stripping reconstruction on phased plane data. The data
/// must cover the partition's wavenumber range; it is interpolated in k,
/// propagated to the top face of `grid`, and inverted interval by interval.
ReconstructionResult run_reconstruction(const ComplexPlaneData& data, const Grid3& grid,
                                        const WavenumberPartition& partition,
                                        const AlgorithmSettings& settings = {});

}  // namespace psir
