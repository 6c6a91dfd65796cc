#include "psir/grid.hpp"

#include <cmath>

namespace psir {

Grid3::Grid3(int n1_, int n2_, int n3_, const BBox& box)
    : n1(n1_), n2(n2_), n3(n3_), bbox(box) {
    if (n1 < 2 || n2 < 2 || n3 < 2)
        throw std::invalid_argument("Grid3: counts must be >= 2 per axis");
    if (bbox.extent1() <= 0 || bbox.extent2() <= 0 || bbox.extent3() <= 0)
        throw std::invalid_argument("Grid3: bbox max must exceed min per axis");
}

PlaneGrid::PlaneGrid(double z_, double half_width_, int m1_, int m2_)
    : z(z_), half_width(half_width_), m1(m1_), m2(m2_) {
    if (half_width <= 0) throw std::invalid_argument("PlaneGrid: half_width must be > 0");
    if (m1 < 2 || m2 < 2) throw std::invalid_argument("PlaneGrid: counts must be >= 2");
}

WavenumberPartition WavenumberPartition::make(double k_low, double k_high, int n_intervals) {
    if (!(k_low < k_high)) throw std::invalid_argument("WavenumberPartition: k_low must be < k_high");
    if (k_low < 1.0) throw std::invalid_argument("WavenumberPartition: k_low must be >= 1");
    if (n_intervals < 1) throw std::invalid_argument("WavenumberPartition: need at least 1 interval");
    WavenumberPartition p;
    p.step = (k_high - k_low) / n_intervals;
    p.k_values.resize(n_intervals + 1);
    for (int m = 0; m <= n_intervals; ++m)
        p.k_values[m] = k_high - m * p.step;
    p.k_values.back() = k_low;  // exact endpoint
    return p;
}

double to_dimensionless(double length_microns) { return length_microns / 10.0; }
double from_dimensionless(double x) { return x * 10.0; }
double to_background_scaled(double x, double n0) { return n0 * x; }
double from_background_scaled(double y, double n0) { return y / n0; }

GridBudgetError::GridBudgetError(std::uint64_t est, std::uint64_t budget, const std::string& what)
    : std::runtime_error(what), estimated_bytes(est), budget_bytes(budget) {}

std::uint64_t grid_memory_estimate(const Grid3& g) {
    return std::uint64_t(g.n1) * g.n2 * g.n3 * sizeof(cdouble);
}

namespace {
int axis_count(double extent, double k_max, double ppw) {
    double raw = extent * k_max * ppw / (2.0 * M_PI);
    int n = int(std::ceil(raw - 1e-12)) + 1;
    return n < 2 ? 2 : n;
}
}  // namespace

Grid3 make_grid(const BBox& bbox, double points_per_wavelength, double k_max,
                std::uint64_t memory_budget_bytes) {
    if (points_per_wavelength < 2) throw std::invalid_argument("make_grid: ppw must be >= 2");
    if (k_max <= 0) throw std::invalid_argument("make_grid: k_max must be > 0");
    int c1 = axis_count(bbox.extent1(), k_max, points_per_wavelength);
    int c2 = axis_count(bbox.extent2(), k_max, points_per_wavelength);
    int c3 = axis_count(bbox.extent3(), k_max, points_per_wavelength);
    std::uint64_t est = std::uint64_t(c1) * c2 * c3 * sizeof(cdouble);
    if (est > memory_budget_bytes)
        throw GridBudgetError(est, memory_budget_bytes,
                              "make_grid: grid of " + std::to_string(c1) + "x" +
                                  std::to_string(c2) + "x" + std::to_string(c3) +
                                  " needs about " + std::to_string(est) +
                                  " bytes per complex field, over the budget of " +
                                  std::to_string(memory_budget_bytes) + " bytes");
    return Grid3(c1, c2, c3, bbox);
}

}  // namespace psir
