#include "psir/phantom.hpp"

#include <cmath>
#include <iostream>

namespace psir {

double bump(double x1, double x2, double x3) {
    double s = x1 * x1 + x2 * x2 + x3 * x3;
    if (s >= 1.0) return 0.0;
    return std::exp(-s / (1.0 - s));
}

RealField3 build_refractive_field(const PhantomSpec& spec, const Grid3& grid) {
    for (const auto& sp : spec.spheres) {
        if (sp.radius <= 0) throw std::invalid_argument("microsphere radius must be > 0");
        if (sp.amplitude < 0) throw std::invalid_argument("microsphere amplitude must be >= 0");
        if (sp.center[0] - sp.radius < grid.bbox.x1min || sp.center[0] + sp.radius > grid.bbox.x1max ||
            sp.center[1] - sp.radius < grid.bbox.x2min || sp.center[1] + sp.radius > grid.bbox.x2max ||
            sp.center[2] - sp.radius < grid.bbox.x3min || sp.center[2] + sp.radius > grid.bbox.x3max)
            throw std::invalid_argument("microsphere support outside grid bbox");
    }
    for (std::size_t a = 0; a < spec.spheres.size(); ++a)
        for (std::size_t b = a + 1; b < spec.spheres.size(); ++b) {
            const auto& s1 = spec.spheres[a];
            const auto& s2 = spec.spheres[b];
            double d = std::hypot(s1.center[0] - s2.center[0], s1.center[1] - s2.center[1],
                                  s1.center[2] - s2.center[2]);
            if (d <= 1.0 && s1.radius <= 0.5 && s2.radius <= 0.5)
                std::cerr << "warning: microsphere centers only " << d
                          << " apart; the separation rule expects > 1\n";
        }

    RealField3 n2(grid, 1.0);
    for (const auto& sp : spec.spheres) {
        for (int l = 0; l < grid.n3; ++l)
            for (int j = 0; j < grid.n2; ++j)
                for (int i = 0; i < grid.n1; ++i) {
                    double v = bump((grid.x1(i) - sp.center[0]) / sp.radius,
                                    (grid.x2(j) - sp.center[1]) / sp.radius,
                                    (grid.x3(l) - sp.center[2]) / sp.radius);
                    if (v != 0.0) n2(i, j, l) += sp.amplitude * v;
                }
    }
    return n2;
}

Preset paper_preset(PresetCase which, double k_scale, int n_intervals, double omega_ppw) {
    if (!(k_scale > 0 && k_scale <= 1))
        throw std::invalid_argument("paper_preset: k_scale must be in (0, 1]");
    Preset p;
    // The printed x3 interval (6.8, 0.7) is inverted; read as (-6.8, 0.7) so
    // the top face sits at x3 = 0.7.
    BBox omega_box{-3.75, 3.75, -3.75, 3.75, -6.8, 0.7};
    p.band = WavenumberPartition::make(108.3 * k_scale, 119.7 * k_scale, n_intervals);
    p.omega = make_grid(omega_box, omega_ppw, p.band.k_high(), kUnlimitedMemoryBudget);
    p.measurement = PlaneGrid(49.5, 3.75, 100, 100);
    p.gamma_z = 0.7;
    p.R = 49.5;
    p.n0 = 1.5;
    if (which == PresetCase::one_sphere) {
        p.phantom.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 1.04}};
    } else {
        // The paper does not state the transverse sphere positions; place the
        // pair symmetric about the origin at separation 1.2.
        p.phantom.spheres = {MicrosphereSpec{{-0.6, 0, 0}, 0.45, 1.04},
                             MicrosphereSpec{{0.6, 0, 0}, 0.45, 1.04}};
    }
    return p;
}

}  // namespace psir
