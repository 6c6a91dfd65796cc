#pragma once

#include <vector>

#include "psir/grid.hpp"

namespace psir {

// Dirichlet problem on the interior nodes of a Grid3:
//   diffusion * lap(u) + drift_scale * (drift . grad u) = rhs,  u = boundary on dOmega
// drift is stored as three complex fields (components on the full grid).
struct DirichletProblem {
    const Grid3* grid = nullptr;
    cdouble diffusion = 1.0;
    // optional drift term; empty vectors mean no drift
    std::vector<cdouble> drift1, drift2, drift3;
    cdouble drift_scale = 1.0;
    // rhs on the full grid (only interior entries are used)
    std::vector<cdouble> rhs;
    // boundary values on the full grid (only boundary entries are used)
    std::vector<cdouble> boundary;
    // largest relative residual the caller is willing to accept when the
    // Krylov solve stagnates short of the tolerance; 0 means strict
    double acceptable_residual = 0;
    // complex zeroth-order term added on the interior nodes; an imaginary
    // shift regularizes interior resonances of the drifted operator
    cdouble shift = 0;
};

struct PdeReport {
    int iterations = 0;
    double residual = 0;
    bool converged = false;
    double max_cell_peclet = 0;  // |drift| * h / (2 |diffusion|), max over interior
};

// Solves the problem with BiCGStab on the second-order finite-difference
// discretization. Returns the solution on the full grid (boundary included).
ComplexField3 solve_dirichlet(const DirichletProblem& problem, PdeReport* report = nullptr,
                              double tolerance = 1e-8, int max_iterations = 2000);

// Convenience wrapper: lap(u) = 0 with the given boundary values.
ComplexField3 solve_laplace(const Grid3& grid, const std::vector<cdouble>& boundary,
                            PdeReport* report = nullptr, double tolerance = 1e-8,
                            int max_iterations = 2000);

// Central-difference gradient of a scalar field; one-sided at the boundary.
void gradient(const ComplexField3& f, std::vector<cdouble>& g1, std::vector<cdouble>& g2,
              std::vector<cdouble>& g3);

// Central-difference divergence of a vector field; one-sided at the boundary.
void divergence(const Grid3& grid, const std::vector<cdouble>& g1, const std::vector<cdouble>& g2,
                const std::vector<cdouble>& g3, std::vector<cdouble>& out);

}  // namespace psir
