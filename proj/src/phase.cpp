#include "psir/phase.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace psir {

namespace {
constexpr double kAmplitudeFloor = 1e-12;
constexpr double kDenomFloor = 1e-12;
}  // namespace

std::size_t IntensityData::top_k_index() const {
    if (k_values.empty()) throw std::invalid_argument("IntensityData: empty k list");
    return std::max_element(k_values.begin(), k_values.end()) - k_values.begin();
}

IntensityData synthesize_intensity(const ComplexPlaneData& u) {
    IntensityData f(u.plane, u.k_values);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        f.values[i] = std::norm(u.values[i]);
    return f;
}

IntensityData add_noise(const IntensityData& f, double level, std::uint64_t seed) {
    if (level < 0) throw std::invalid_argument("add_noise: level must be >= 0");
    IntensityData out = f;
    if (level == 0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xi(-1.0, 1.0);
    for (double& v : out.values) v = std::max(0.0, v * (1.0 + level * xi(rng)));
    return out;
}

IntensityData interpolate_in_k(const IntensityData& measured, const WavenumberPartition& targets) {
    if (measured.k_values.size() < 2)
        throw std::invalid_argument("interpolate_in_k: need at least two measured wavenumbers");
    // measured k's sorted ascending by index for the search
    std::vector<std::size_t> order(measured.k_values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return measured.k_values[a] < measured.k_values[b];
    });
    double klo = measured.k_values[order.front()];
    double khi = measured.k_values[order.back()];

    IntensityData out(measured.plane, targets.k_values);
    const std::size_t npix = measured.plane.size();
    for (std::size_t ti = 0; ti < targets.k_values.size(); ++ti) {
        double k = targets.k_values[ti];
        if (k < klo - 1e-12 * khi || k > khi + 1e-12 * khi)
            throw std::out_of_range("interpolate_in_k: target outside measured band");
        k = std::clamp(k, klo, khi);
        std::size_t seg = 0;
        while (seg + 2 < order.size() && measured.k_values[order[seg + 1]] < k) ++seg;
        double ka = measured.k_values[order[seg]];
        double kb = measured.k_values[order[seg + 1]];
        double t = (k - ka) / (kb - ka);
        const double* fa = measured.slice(order[seg]);
        const double* fb = measured.slice(order[seg + 1]);
        double* dst = out.slice(ti);
        for (std::size_t p = 0; p < npix; ++p) dst[p] = (1.0 - t) * fa[p] + t * fb[p];
    }
    return out;
}

std::vector<double> retrieve_amplitude(const IntensityData& f) {
    std::size_t ki = f.top_k_index();
    const double* top = f.slice(ki);
    std::vector<double> a(f.plane.size());
    for (std::size_t p = 0; p < a.size(); ++p)
        a[p] = std::sqrt(std::max(top[p], kAmplitudeFloor));
    return a;
}

TravelTime retrieve_travel_time(const IntensityData& f, double k) {
    std::size_t ki = f.k_values.size();
    for (std::size_t i = 0; i < f.k_values.size(); ++i)
        if (f.k_values[i] == k) { ki = i; break; }
    if (ki == f.k_values.size())
        throw std::invalid_argument("retrieve_travel_time: k not in the data band");
    const double R = f.plane.z;
    const double* top = f.slice(f.top_k_index());
    const double* fk = f.slice(ki);
    TravelTime out;
    out.tau.resize(f.plane.size());
    std::size_t clamped = 0;
    for (std::size_t p = 0; p < out.tau.size(); ++p) {
        double denom = 2.0 * std::sqrt(std::max(top[p], 0.0));
        if (denom < kDenomFloor) {
            out.tau[p] = R;
            ++clamped;
            continue;
        }
        double g = (fk[p] + 1.0) / denom;
        if (std::abs(g) > 1.0) {
            out.tau[p] = R;
            ++clamped;
        } else {
            out.tau[p] = std::acos(g) / k + R;
        }
    }
    out.clamp_fraction = double(clamped) / double(out.tau.size());
    return out;
}

RetrievedField retrieve_phased(const IntensityData& f) {
    std::size_t top = f.top_k_index();
    const double* ftop = f.slice(top);
    const double R = f.plane.z;
    RetrievedField out;
    out.u = ComplexPlaneData(f.plane, f.k_values);
    std::size_t clamped = 0;
    const std::size_t npix = f.plane.size();
    for (std::size_t ki = 0; ki < f.k_values.size(); ++ki) {
        double k = f.k_values[ki];
        const double* fk = f.slice(ki);
        cdouble* dst = out.u.slice(ki);
        for (std::size_t p = 0; p < npix; ++p) {
            double amp = std::sqrt(std::max(ftop[p], kAmplitudeFloor));
            double denom = 2.0 * std::sqrt(std::max(ftop[p], 0.0));
            double phase;
            if (denom < kDenomFloor) {
                phase = 0.0;
                ++clamped;
            } else {
                double g = (fk[p] + 1.0) / denom;
                if (std::abs(g) > 1.0) {
                    phase = 0.0;
                    ++clamped;
                } else {
                    phase = std::acos(g);
                }
            }
            dst[p] = amp * std::exp(cdouble(0, phase + k * R));
        }
    }
    out.clamp_fraction = double(clamped) / double(npix * f.k_values.size());
    return out;
}

}  // namespace psir
