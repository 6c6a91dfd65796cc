#include <doctest.h>

#include <cmath>

#include "psir/forward.hpp"
#include "psir/phantom.hpp"

using namespace psir;

TEST_CASE("vacuum scattering returns the incident wave exactly") {
    Grid3 g(9, 9, 9, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2(g, 1.0);
    SolverSettings s;
    ForwardSolution sol = solve_ls(n2, 4.0, s);
    CHECK(sol.converged);
    CHECK(sol.iterations == 0);
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                CHECK(std::abs(sol.u(i, j, l) - incident(g.x3(l), 4.0)) < 1e-14);
}

TEST_CASE("n^2 below one is rejected") {
    Grid3 g(5, 5, 5, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2(g, 0.9);
    SolverSettings s;
    CHECK_THROWS(solve_ls(n2, 4.0, s));
}

TEST_CASE("converged solution has a small discrete residual") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 0.5}};
    Grid3 g(17, 17, 17, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2 = build_refractive_field(spec, g);
    SolverSettings s;
    const double k = 5.0;
    GreenConvolver conv(g, k);
    ForwardSolution sol = solve_ls(n2, k, s, &conv);
    CHECK(sol.converged);
    CHECK(ls_residual(sol, n2, conv) < 5e-6);
}

TEST_CASE("weak contrast stays near the Born approximation") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 1e-3}};
    Grid3 g(17, 17, 17, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2 = build_refractive_field(spec, g);
    SolverSettings s;
    const double k = 5.0;
    ForwardSolution sol = solve_ls(n2, k, s);
    PlaneGrid plane(2.0, 1.0, 11, 11);
    ComplexPlaneData u_ls = evaluate_exterior(sol, n2, plane);
    ComplexPlaneData u_born = born_reference(n2, k, plane);
    double num = 0, den = 0;
    cdouble inc = incident(plane.z, k);
    for (std::size_t p = 0; p < plane.size(); ++p) {
        num += std::norm(u_ls.values[p] - u_born.values[p]);
        den += std::norm(u_born.values[p] - inc);
    }
    CHECK(den > 0);
    CHECK(std::sqrt(num / den) < 0.01);  // same quadrature: only multiple scattering differs
}

TEST_CASE("exterior evaluation rejects planes through the support") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 0.5}};
    Grid3 g(11, 11, 11, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2 = build_refractive_field(spec, g);
    SolverSettings s;
    ForwardSolution sol = solve_ls(n2, 3.0, s);
    CHECK_THROWS(evaluate_exterior(sol, n2, PlaneGrid(0.0, 1.0, 5, 5)));
    CHECK_NOTHROW(evaluate_exterior(sol, n2, PlaneGrid(2.0, 1.0, 5, 5)));
}

TEST_CASE("far field approaches the exact exterior field at large R") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 0.3}};
    Grid3 g(15, 15, 15, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2 = build_refractive_field(spec, g);
    SolverSettings s;
    const double k = 2.0;
    ForwardSolution sol = solve_ls(n2, k, s);
    PlaneGrid plane(500.0, 0.5, 3, 3);
    ComplexPlaneData exact = evaluate_exterior(sol, n2, plane);
    ComplexPlaneData far = far_field_plane(sol, n2, plane);
    cdouble inc = incident(plane.z, k);
    // compare the scattered parts at the axis node
    cdouble sc_exact = exact.values[exact.plane.idx(1, 1)] - inc;
    cdouble sc_far = far.values[far.plane.idx(1, 1)];  // already the scattered part
    CHECK(std::abs(sc_exact - sc_far) < 0.05 * std::abs(sc_exact));
}

TEST_CASE("analytic bound arithmetic") {
    CHECK(analytic_bound(119.6, 49.5, 1) == doctest::Approx(0.0370).epsilon(0.01));
    CHECK(analytic_bound(119.6, 49.5, 2) == doctest::Approx(0.1479).epsilon(0.01));
    CHECK(analytic_bound(119.6, 49.5, 2) ==
          doctest::Approx(4 * analytic_bound(119.6, 49.5, 1)));
    CHECK_THROWS(analytic_bound(1.0, -1.0, 1));
    CHECK_THROWS(analytic_bound(1.0, 1.0, 0));
}

TEST_CASE("phi_of_k and max-modulus bound consistency") {
    PhantomSpec spec;
    spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 1.04}};
    Grid3 g(15, 15, 15, BBox{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5});
    RealField3 n2 = build_refractive_field(spec, g);
    SolverSettings s;
    const double k = 5.0;
    ForwardSolution sol = solve_ls(n2, k, s);
    PlaneGrid plane(49.5, 3.75, 21, 21);
    ComplexPlaneData data = evaluate_exterior(sol, n2, plane);
    double phi = phi_of_k(data, k);
    CHECK(phi > 0);
    CHECK(phi < analytic_bound(k, 49.5, 1));
    CHECK_THROWS(phi_of_k(data, 123.0));
}
