#include <doctest.h>

#include <cmath>

#include "psir/phantom.hpp"

using namespace psir;

TEST_CASE("bump is smooth, compact, and normalized at the center") {
    CHECK(bump(0, 0, 0) == doctest::Approx(1.0));
    CHECK(bump(1, 0, 0) == 0.0);
    CHECK(bump(0.99999, 0, 0) < 1e-10);
    CHECK(bump(2, 3, 4) == 0.0);
    // radial monotonicity on a few samples
    double prev = 1.0;
    for (double r = 0.1; r < 0.95; r += 0.1) {
        double v = bump(r, 0, 0);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
    // value and first finite difference decay continuously to zero at |x| = 1
    double h = 1e-4;
    CHECK(bump(1 - h, 0, 0) < 1e-8);
    CHECK((bump(1 - h, 0, 0) - bump(1 - 2 * h, 0, 0)) / h < 1e-3);
}

TEST_CASE("refractive field peaks at sphere centers and respects support") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 1.04}};
    Grid3 g(41, 41, 41, BBox{-1, 1, -1, 1, -1, 1});
    RealField3 n2 = build_refractive_field(spec, g);
    CHECK(n2(20, 20, 20) == doctest::Approx(2.04));
    CHECK(n2(0, 0, 0) == doctest::Approx(1.0));
    double mx = 0;
    for (double v : n2.values) {
        CHECK(v >= 1.0);
        mx = std::max(mx, v);
    }
    CHECK(mx == doctest::Approx(2.04));

    // support escaping the box is rejected
    PhantomSpec outside;
    outside.spheres = {MicrosphereSpec{{0.9, 0, 0}, 0.45, 1.04}};
    CHECK_THROWS(build_refractive_field(outside, g));
}

TEST_CASE("two-sphere phantom is additive for disjoint supports") {
    Grid3 g(61, 31, 31, BBox{-2, 2, -1, 1, -1, 1});
    PhantomSpec both;
    both.spheres = {MicrosphereSpec{{-0.6, 0, 0}, 0.45, 1.04},
                    MicrosphereSpec{{0.6, 0, 0}, 0.45, 1.04}};
    PhantomSpec left{{both.spheres[0]}}, right{{both.spheres[1]}};
    RealField3 a = build_refractive_field(both, g);
    RealField3 b = build_refractive_field(left, g);
    RealField3 c = build_refractive_field(right, g);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] ==
              doctest::Approx(b.values[i] + c.values[i] - 1.0).epsilon(1e-12));
}

TEST_CASE("paper preset geometry") {
    Preset p = paper_preset(PresetCase::one_sphere, 0.1);
    CHECK(p.measurement.z == doctest::Approx(49.5));
    CHECK(p.measurement.half_width == doctest::Approx(3.75));
    CHECK(p.band.k_high() == doctest::Approx(11.97));
    CHECK(p.band.k_low() == doctest::Approx(10.83));
    CHECK(p.omega.bbox.x3min == doctest::Approx(-6.8));
    CHECK(p.omega.bbox.x3max == doctest::Approx(0.7));
    CHECK(p.phantom.spheres.size() == 1);
    Preset q = paper_preset(PresetCase::two_spheres, 0.1);
    CHECK(q.phantom.spheres.size() == 2);
    CHECK(q.phantom.spheres[0].center[0] == doctest::Approx(-0.6));
    CHECK(q.phantom.spheres[1].center[0] == doctest::Approx(0.6));
}
