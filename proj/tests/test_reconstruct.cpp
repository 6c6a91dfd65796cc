#include <doctest.h>

#include <cmath>
#include <random>

#include "psir/pde.hpp"
#include "psir/reconstruct.hpp"

using namespace psir;

namespace {

Grid3 small_domain() { return Grid3(13, 13, 13, BBox{-1, 1, -1, 1, -1.6, 0.4}); }

/// Vacuum plane data u = e^{ikR} at the partition wavenumbers.
ComplexPlaneData vacuum_data(const PlaneGrid& plane, const WavenumberPartition& part) {
    ComplexPlaneData data(plane, part.k_values);
    for (std::size_t ki = 0; ki < part.k_values.size(); ++ki) {
        cdouble v = std::exp(cdouble(0, part.k_values[ki] * plane.z));
        cdouble* s = data.slice(ki);
        for (std::size_t p = 0; p < plane.size(); ++p) s[p] = v;
    }
    return data;
}

}  // namespace

TEST_CASE("boundary gradient: vacuum data gives (0, 0, ik) everywhere") {
    Grid3 g = small_domain();
    const double k = 6.0;
    std::size_t face = std::size_t(g.n1) * g.n2;
    std::vector<cdouble> p_top(face, std::exp(cdouble(0, k * g.bbox.x3max)));
    std::vector<cdouble> p1_top(face,
                                cdouble(0, k) * std::exp(cdouble(0, k * g.bbox.x3max)));
    VectorField3 b = boundary_gradient(g, p_top, p1_top, k);
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t p = g.idx(i, j, l);
                bool bdry = i == 0 || j == 0 || l == 0 || i == g.n1 - 1 || j == g.n2 - 1 ||
                            l == g.n3 - 1;
                if (!bdry) {
                    CHECK(b.c3[p] == cdouble(0, 0));
                } else {
                    CHECK(std::abs(b.c1[p]) < 1e-12);
                    CHECK(std::abs(b.c2[p]) < 1e-12);
                    CHECK(std::abs(b.c3[p] - cdouble(0, k)) < 1e-12);
                }
            }
}

TEST_CASE("initial tail of vacuum data is the constant incident gradient") {
    Grid3 g = small_domain();
    const double k = 6.0;
    std::size_t face = std::size_t(g.n1) * g.n2;
    std::vector<cdouble> p_top(face, std::exp(cdouble(0, k * g.bbox.x3max)));
    std::vector<cdouble> p1_top(face,
                                cdouble(0, k) * std::exp(cdouble(0, k * g.bbox.x3max)));
    TailGradient tail = init_tail(boundary_gradient(g, p_top, p1_top, k), 1e-11);
    for (std::size_t p = 0; p < g.size(); ++p) {
        CHECK(std::abs(tail.grad.c1[p]) < 1e-8);
        CHECK(std::abs(tail.grad.c2[p]) < 1e-8);
        CHECK(std::abs(tail.grad.c3[p] - cdouble(0, k)) < 1e-8);
        CHECK(std::abs(tail.div[p]) < 1e-6);
    }
}

TEST_CASE("q boundary: vacuum data gives i x3 on every face") {
    Grid3 g = small_domain();
    const double ka = 6.0, kb = 5.4;
    std::size_t face = std::size_t(g.n1) * g.n2;
    std::vector<cdouble> pa(face, std::exp(cdouble(0, ka * g.bbox.x3max)));
    std::vector<cdouble> pb(face, std::exp(cdouble(0, kb * g.bbox.x3max)));
    std::vector<cdouble> qb = q_boundary(g, pa, pb, ka, kb);
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t p = g.idx(i, j, l);
                bool bdry = i == 0 || j == 0 || l == 0 || i == g.n1 - 1 || j == g.n2 - 1 ||
                            l == g.n3 - 1;
                if (bdry)
                    CHECK(std::abs(qb[p] - cdouble(0, g.x3(l))) < 1e-12);
                else
                    CHECK(qb[p] == cdouble(0, 0));
            }
    // the reference geometry's bottom face sits at x3 = -6.8
    Grid3 omega(5, 5, 5, BBox{-3.75, 3.75, -3.75, 3.75, -6.8, 0.7});
    std::vector<cdouble> topv(25, std::exp(cdouble(0, ka * 0.7)));
    std::vector<cdouble> topw(25, std::exp(cdouble(0, kb * 0.7)));
    std::vector<cdouble> qb2 = q_boundary(omega, topv, topw, ka, kb);
    CHECK(std::abs(qb2[omega.idx(2, 2, 0)] - cdouble(0, -6.8)) < 1e-12);
}

TEST_CASE("compute_c clamps into [1, c_max] and is exact for plane waves") {
    Grid3 g = small_domain();
    const double k = 6.0;
    VectorField3 gv(g);
    for (std::size_t p = 0; p < g.size(); ++p) gv.c3[p] = cdouble(0, k);
    RealField3 c = compute_c(g, gv, k, 6.0);
    for (double v : c.values) CHECK(v == doctest::Approx(1.0));

    // random gradients stay within the clamp window
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-20, 20);
    for (std::size_t p = 0; p < g.size(); ++p) {
        gv.c1[p] = cdouble(d(rng), d(rng));
        gv.c2[p] = cdouble(d(rng), d(rng));
        gv.c3[p] = cdouble(d(rng), d(rng));
    }
    RealField3 cr = compute_c(g, gv, k, 4.5);
    for (double v : cr.values) {
        CHECK(v >= 1.0);
        CHECK(v <= 4.5);
    }
}

TEST_CASE("vacuum reconstruction returns c identically one") {
    Grid3 g = small_domain();
    PlaneGrid plane(9.5, 1.0, 16, 16);
    auto part = WavenumberPartition::make(5.4, 6.0, 3);
    ComplexPlaneData data = vacuum_data(plane, part);
    AlgorithmSettings settings;
    settings.inner_iterations = 2;
    ReconstructionResult res = run_reconstruction(data, g, part, settings);
    double dev = 0;
    for (double v : res.c.values) dev = std::max(dev, std::abs(v - 1.0));
    CHECK(dev <= 1e-3);
    CHECK(res.n_comp == doctest::Approx(settings.n0).epsilon(1e-3));
    CHECK(res.n_star >= 1);
    CHECK(res.log.size() == std::size_t(part.intervals()) * 2);
}

TEST_CASE("reconstruction settings are respected in the iterate log") {
    Grid3 g(9, 9, 9, BBox{-1, 1, -1, 1, -1.6, 0.4});
    PlaneGrid plane(9.5, 1.0, 12, 12);
    auto part = WavenumberPartition::make(5.0, 6.0, 2);
    ComplexPlaneData data = vacuum_data(plane, part);
    AlgorithmSettings settings;
    settings.inner_iterations = 1;
    ReconstructionResult res = run_reconstruction(data, g, part, settings);
    REQUIRE(res.log.size() == 2);
    CHECK(res.log[0].find("\"interval\":1") != std::string::npos);
    CHECK(res.log[0].find("\"iterate\":1") != std::string::npos);
    CHECK(res.change_history.size() == std::size_t(part.intervals()) + 1);
}

TEST_CASE("partition data outside the band is rejected") {
    Grid3 g(9, 9, 9, BBox{-1, 1, -1, 1, -1.6, 0.4});
    PlaneGrid plane(9.5, 1.0, 12, 12);
    auto part = WavenumberPartition::make(5.0, 6.0, 2);
    ComplexPlaneData data = vacuum_data(plane, part);
    auto wider = WavenumberPartition::make(4.0, 6.0, 2);
    CHECK_THROWS_AS(run_reconstruction(data, g, wider, AlgorithmSettings{}),
                    std::out_of_range);
}
