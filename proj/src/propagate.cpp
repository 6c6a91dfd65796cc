#include "psir/propagate.hpp"

#include <cmath>

#include "psir/fft.hpp"

namespace psir {

std::vector<cdouble> angular_spectrum(const PlaneGrid& plane,
                                      const std::vector<cdouble>& values,
                                      double target_z, double k, int pad_factor) {
    if (values.size() != plane.size())
        throw std::invalid_argument("angular_spectrum: size mismatch");
    if (k <= 0) throw std::invalid_argument("angular_spectrum: k must be > 0");
    if (pad_factor < 1) throw std::invalid_argument("angular_spectrum: pad_factor must be >= 1");

    const int m1 = plane.m1, m2 = plane.m2;
    const int M1 = pad_factor == 1 ? m1 : next_fast_size(pad_factor * m1);
    const int M2 = pad_factor == 1 ? m2 : next_fast_size(pad_factor * m2);
    const double s1 = plane.s1(), s2 = plane.s2();
    const double dz = target_z - plane.z;

    std::vector<cdouble> buf(std::size_t(M1) * M2, cdouble(0));
    for (int j = 0; j < m2; ++j)
        for (int i = 0; i < m1; ++i)
            buf[std::size_t(i) + std::size_t(M1) * j] = values[plane.idx(i, j)];

    Fft2 fft(M1, M2);
    fft.forward(buf.data());

    for (int j = 0; j < M2; ++j) {
        int f2 = j <= M2 / 2 ? j : j - M2;
        double k2m = 2.0 * M_PI * f2 / (M2 * s2);
        for (int i = 0; i < M1; ++i) {
            int f1 = i <= M1 / 2 ? i : i - M1;
            double k1m = 2.0 * M_PI * f1 / (M1 * s1);
            double kt2 = k1m * k1m + k2m * k2m;
            std::size_t idx = std::size_t(i) + std::size_t(M1) * j;
            if (kt2 < k * k) {
                double k3 = std::sqrt(k * k - kt2);
                buf[idx] *= std::exp(cdouble(0, k3 * dz));
            } else {
                buf[idx] = 0;  // evanescent
            }
        }
    }
    fft.inverse(buf.data());

    std::vector<cdouble> out(plane.size());
    for (int j = 0; j < m2; ++j)
        for (int i = 0; i < m1; ++i)
            out[plane.idx(i, j)] = buf[std::size_t(i) + std::size_t(M1) * j];
    return out;
}

std::vector<cdouble> normal_derivative(const PlaneGrid& plane,
                                       const std::vector<cdouble>& values,
                                       double target_z, double k, double eps,
                                       int pad_factor) {
    if (eps <= 0) throw std::invalid_argument("normal_derivative: eps must be > 0");
    // centered difference: truncation k^3 eps^2 / 6 instead of k^2 eps / 2
    auto up = angular_spectrum(plane, values, target_z + eps, k, pad_factor);
    auto down = angular_spectrum(plane, values, target_z - eps, k, pad_factor);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = (up[i] - down[i]) / (2 * eps);
    return up;
}

std::vector<cdouble> resample_to_face(const PlaneGrid& plane,
                                      const std::vector<cdouble>& values,
                                      const Grid3& grid) {
    if (values.size() != plane.size())
        throw std::invalid_argument("resample_to_face: size mismatch");
    std::vector<cdouble> out(std::size_t(grid.n1) * grid.n2);
    for (int j = 0; j < grid.n2; ++j)
        for (int i = 0; i < grid.n1; ++i) {
            double t1 = (grid.x1(i) + plane.half_width) / plane.s1();
            double t2 = (grid.x2(j) + plane.half_width) / plane.s2();
            int i0 = std::clamp(int(std::floor(t1)), 0, plane.m1 - 2);
            int j0 = std::clamp(int(std::floor(t2)), 0, plane.m2 - 2);
            double a = std::clamp(t1 - i0, 0.0, 1.0);
            double b = std::clamp(t2 - j0, 0.0, 1.0);
            out[std::size_t(i) + std::size_t(grid.n1) * j] =
                (1 - a) * (1 - b) * values[plane.idx(i0, j0)] +
                a * (1 - b) * values[plane.idx(i0 + 1, j0)] +
                (1 - a) * b * values[plane.idx(i0, j0 + 1)] +
                a * b * values[plane.idx(i0 + 1, j0 + 1)];
        }
    return out;
}

ComplexField3 complement(const std::vector<cdouble>& p_top_face, double k, const Grid3& grid) {
    if (p_top_face.size() != std::size_t(grid.n1) * grid.n2)
        throw std::invalid_argument("complement: face size mismatch");
    ComplexField3 out(grid);
    for (int l = 0; l < grid.n3; ++l) {
        cdouble inc = std::exp(cdouble(0, k * grid.x3(l)));
        for (int j = 0; j < grid.n2; ++j)
            for (int i = 0; i < grid.n1; ++i) {
                bool boundary = i == 0 || i == grid.n1 - 1 || j == 0 || j == grid.n2 - 1 ||
                                l == 0 || l == grid.n3 - 1;
                if (!boundary) continue;
                if (l == grid.n3 - 1)
                    out(i, j, l) = p_top_face[std::size_t(i) + std::size_t(grid.n1) * j];
                else
                    out(i, j, l) = inc;
            }
    }
    return out;
}

}  // namespace psir
