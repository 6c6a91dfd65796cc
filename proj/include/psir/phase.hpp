#pragma once

#include <cstdint>
#include <vector>

#include "psir/grid.hpp"

namespace psir {

/// Complex wave field sampled on a plane for a list of wavenumbers.
/// Slice ki is contiguous, node layout x1-fastest.
struct ComplexPlaneData {
    PlaneGrid plane;
    std::vector<double> k_values;
    std::vector<cdouble> values;

    ComplexPlaneData() = default;
    ComplexPlaneData(const PlaneGrid& p, std::vector<double> ks)
        : plane(p), k_values(std::move(ks)),
          values(p.size() * k_values.size(), cdouble(0)) {}

    cdouble* slice(std::size_t ki) { return values.data() + ki * plane.size(); }
    const cdouble* slice(std::size_t ki) const { return values.data() + ki * plane.size(); }
};

/// Nonnegative intensity f(x,k) = |u|^2 on the measurement plane.
struct IntensityData {
    PlaneGrid plane;
    std::vector<double> k_values;
    std::vector<double> values;

    IntensityData() = default;
    IntensityData(const PlaneGrid& p, std::vector<double> ks)
        : plane(p), k_values(std::move(ks)), values(p.size() * k_values.size(), 0.0) {}

    double* slice(std::size_t ki) { return values.data() + ki * plane.size(); }
    const double* slice(std::size_t ki) const { return values.data() + ki * plane.size(); }

    /// Index of the largest wavenumber (the k-bar slice).
    std::size_t top_k_index() const;
};

IntensityData synthesize_intensity(const ComplexPlaneData& u);

/// f' = f * (1 + level * xi), xi uniform on [-1,1] per node, clipped at 0.
IntensityData add_noise(const IntensityData& f, double level, std::uint64_t seed);

/// Pointwise linear interpolation in k from data measured at >= 2 wavenumbers.
IntensityData interpolate_in_k(const IntensityData& measured, const WavenumberPartition& targets);

/// A(x) = sqrt(max(f(x, k_bar), 1e-12)).
std::vector<double> retrieve_amplitude(const IntensityData& f);

struct TravelTime {
    std::vector<double> tau;
    double clamp_fraction = 0;
};

/// tau = arccos(g)/k + R with g = (f(x,k)+1) / (2 sqrt(f(x,k_bar))), branch
/// m = 0; clamped to tau = R wherever |g| > 1 or the denominator underflows.
TravelTime retrieve_travel_time(const IntensityData& f, double k);

struct RetrievedField {
    ComplexPlaneData u;
    double clamp_fraction = 0;  // over all (node, k) pairs
};

/// Inversion formula: u(x,k) = sqrt(f(x,k_bar)) exp(i arccos(g) + i k R),
/// clamped nodes get phase k R.
RetrievedField retrieve_phased(const IntensityData& f);

}  // namespace psir
