#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psir {

using cdouble = std::complex<double>;

/// Axis-aligned bounding box, dimensionless units.
struct BBox {
    double x1min = 0, x1max = 0;
    double x2min = 0, x2max = 0;
    double x3min = 0, x3max = 0;

    double extent1() const { return x1max - x1min; }
    double extent2() const { return x2max - x2min; }
    double extent3() const { return x3max - x3min; }
};

/// Uniform rectilinear sampling of a box. Values stored x1-fastest.
struct Grid3 {
    int n1 = 2, n2 = 2, n3 = 2;
    BBox bbox;

    Grid3() = default;
    Grid3(int n1_, int n2_, int n3_, const BBox& box);

    double h1() const { return bbox.extent1() / (n1 - 1); }
    double h2() const { return bbox.extent2() / (n2 - 1); }
    double h3() const { return bbox.extent3() / (n3 - 1); }
    double cell_volume() const { return h1() * h2() * h3(); }

    double x1(int i) const { return bbox.x1min + i * h1(); }
    double x2(int j) const { return bbox.x2min + j * h2(); }
    double x3(int l) const { return bbox.x3min + l * h3(); }

    std::size_t size() const {
        return std::size_t(n1) * std::size_t(n2) * std::size_t(n3);
    }
    std::size_t idx(int i, int j, int l) const {
        return std::size_t(i) + std::size_t(n1) * (std::size_t(j) + std::size_t(n2) * l);
    }

    bool same_layout(const Grid3& o) const {
        return n1 == o.n1 && n2 == o.n2 && n3 == o.n3;
    }
};

/// Uniform square sampling of a plane {x3 = z}, |x1|,|x2| < half_width.
struct PlaneGrid {
    double z = 0;
    double half_width = 1;
    int m1 = 100, m2 = 100;  // 100x100 default

    PlaneGrid() = default;
    PlaneGrid(double z_, double half_width_, int m1_, int m2_);

    double s1() const { return 2 * half_width / (m1 - 1); }
    double s2() const { return 2 * half_width / (m2 - 1); }
    double x1(int i) const { return -half_width + i * s1(); }
    double x2(int j) const { return -half_width + j * s2(); }

    std::size_t size() const { return std::size_t(m1) * std::size_t(m2); }
    std::size_t idx(int i, int j) const { return std::size_t(i) + std::size_t(m1) * j; }
};

/// Strictly decreasing uniform partition k0 = k_high down to kN = k_low.
struct WavenumberPartition {
    std::vector<double> k_values;  // k_values[0] = k_high, decreasing
    double step = 0;               // h > 0

    static WavenumberPartition make(double k_low, double k_high, int n_intervals);

    int intervals() const { return int(k_values.size()) - 1; }
    double k_high() const { return k_values.front(); }
    double k_low() const { return k_values.back(); }
};

struct RealField3 {
    Grid3 grid;
    std::vector<double> values;

    RealField3() = default;
    explicit RealField3(const Grid3& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& operator()(int i, int j, int l) { return values[grid.idx(i, j, l)]; }
    double operator()(int i, int j, int l) const { return values[grid.idx(i, j, l)]; }
};

struct ComplexField3 {
    Grid3 grid;
    std::vector<cdouble> values;

    ComplexField3() = default;
    explicit ComplexField3(const Grid3& g, cdouble fill = {})
        : grid(g), values(g.size(), fill) {}

    cdouble& operator()(int i, int j, int l) { return values[grid.idx(i, j, l)]; }
    cdouble operator()(int i, int j, int l) const { return values[grid.idx(i, j, l)]; }
};

// Length scalings at the I/O boundary. All internal computation uses the
// scaled coordinates.
double to_dimensionless(double length_microns);        // x / 10um
double from_dimensionless(double x);                   // inverse
double to_background_scaled(double x, double n0);      // y = n0 * x
double from_background_scaled(double y, double n0);

/// Thrown when a requested grid would exceed the memory budget.
class GridBudgetError : public std::runtime_error {
  public:
    GridBudgetError(std::uint64_t estimated_bytes, std::uint64_t budget_bytes,
                    const std::string& what);
    std::uint64_t estimated_bytes;
    std::uint64_t budget_bytes;
};

constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t(16) << 30;  // 16 GiB
constexpr std::uint64_t kUnlimitedMemoryBudget = ~std::uint64_t(0);

/// Per-axis count = ceil(extent * k_max * ppw / (2*pi)) + 1, minimum 2.
/// Refuses with a byte estimate when the grid exceeds the budget.
Grid3 make_grid(const BBox& bbox, double points_per_wavelength, double k_max,
                std::uint64_t memory_budget_bytes = kDefaultMemoryBudget);

/// Byte estimate used by the budget check (one complex field on the grid).
std::uint64_t grid_memory_estimate(const Grid3& g);

}  // namespace psir
