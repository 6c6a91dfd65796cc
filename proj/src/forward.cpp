#include "psir/forward.hpp"

#include <cmath>
#include <iostream>
#include <optional>

#include "psir/kernels.hpp"
#include "psir/krylov.hpp"

namespace psir {

cdouble incident(double x3, double k) { return std::exp(cdouble(0, k * x3)); }

namespace {

struct SupportNode {
    double x1, x2, x3;
    double beta;  // n^2 - 1
    std::size_t idx;
};

std::vector<SupportNode> contrast_support(const RealField3& n2) {
    std::vector<SupportNode> nodes;
    const Grid3& g = n2.grid;
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                double beta = n2(i, j, l) - 1.0;
                if (beta != 0.0)
                    nodes.push_back({g.x1(i), g.x2(j), g.x3(l), beta, g.idx(i, j, l)});
            }
    return nodes;
}

void check_resolution(const Grid3& g, double k, double ppw) {
    double lambda = 2.0 * M_PI / k;
    double hmax = std::max({g.h1(), g.h2(), g.h3()});
    if (lambda / hmax < ppw - 1e-9)
        std::cerr << "warning: grid resolves only " << lambda / hmax
                  << " points per wavelength at k = " << k << " (requested " << ppw << ")\n";
}

}  // namespace

ForwardSolution solve_ls(const RealField3& n2, double k, const SolverSettings& settings,
                         const GreenConvolver* convolver) {
    const Grid3& g = n2.grid;
    check_resolution(g, k, settings.points_per_wavelength);
    for (double v : n2.values)
        if (v < 1.0 - 1e-12) throw std::invalid_argument("solve_ls: n^2 must be >= 1");

    std::optional<GreenConvolver> local;
    if (!convolver) local.emplace(g, k);
    const GreenConvolver& conv = convolver ? *convolver : *local;
    if (convolver && (!conv.grid().same_layout(g) || conv.k() != k))
        throw std::invalid_argument("solve_ls: cached convolver does not match grid/k");

    std::vector<double> beta(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) beta[i] = n2.values[i] - 1.0;

    std::vector<cdouble> b(g.size());
    for (int l = 0; l < g.n3; ++l) {
        cdouble inc = incident(g.x3(l), k);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) b[g.idx(i, j, l)] = inc;
    }

    const double k2 = k * k;
    std::vector<cdouble> tmp(g.size());
    auto apply = [&](const std::vector<cdouble>& x, std::vector<cdouble>& out) {
        kern::rzmul(beta.data(), x.data(), tmp.data(), g.size());
        conv.apply(tmp, out);
        for (std::size_t i = 0; i < g.size(); ++i) out[i] = x[i] - k2 * out[i];
    };

    ForwardSolution sol;
    sol.k = k;
    sol.u = ComplexField3(g);
    sol.u.values = b;  // incident field as the initial guess
    KrylovReport rep = bicgstab(apply, b, sol.u.values, settings.tolerance,
                                settings.max_iterations);
    sol.residual = rep.residual;
    sol.iterations = rep.iterations;
    sol.converged = rep.converged;
    if (!rep.converged)
        std::cerr << "warning: Lippmann-Schwinger solve did not converge (residual "
                  << rep.residual << " after " << rep.iterations << " iterations)\n";
    return sol;
}

double ls_residual(const ForwardSolution& sol, const RealField3& n2,
                   const GreenConvolver& conv) {
    const Grid3& g = n2.grid;
    const double k2 = sol.k * sol.k;
    std::vector<cdouble> tmp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        tmp[i] = (n2.values[i] - 1.0) * sol.u.values[i];
    std::vector<cdouble> conv_out;
    conv.apply(tmp, conv_out);
    double num = 0, den = 0;
    for (int l = 0; l < g.n3; ++l) {
        cdouble inc = incident(g.x3(l), sol.k);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t id = g.idx(i, j, l);
                cdouble r = sol.u.values[id] - k2 * conv_out[id] - inc;
                num += std::norm(r);
                den += std::norm(inc);
            }
    }
    return std::sqrt(num / den);
}

ComplexPlaneData evaluate_exterior(const ForwardSolution& sol, const RealField3& n2,
                                   const PlaneGrid& targets) {
    const Grid3& g = n2.grid;
    auto support = contrast_support(n2);
    for (const auto& s : support)
        if (std::abs(s.x3 - targets.z) < 0.5 * g.h3())
            throw std::invalid_argument("evaluate_exterior: plane intersects contrast support");

    const double k = sol.k;
    const double w = g.cell_volume() * k * k;
    ComplexPlaneData out(targets, {k});
    cdouble* dst = out.slice(0);
    for (int j = 0; j < targets.m2; ++j)
        for (int i = 0; i < targets.m1; ++i) {
            double x1 = targets.x1(i), x2 = targets.x2(j), x3 = targets.z;
            cdouble acc = 0;
            for (const auto& s : support) {
                double r = std::sqrt((x1 - s.x1) * (x1 - s.x1) + (x2 - s.x2) * (x2 - s.x2) +
                                     (x3 - s.x3) * (x3 - s.x3));
                acc += s.beta * sol.u.values[s.idx] * std::exp(cdouble(0, k * r)) / (4.0 * M_PI * r);
            }
            dst[out.plane.idx(i, j)] = incident(x3, k) + w * acc;
        }
    return out;
}

ComplexPlaneData far_field_plane(const ForwardSolution& sol, const RealField3& n2,
                                 const PlaneGrid& plane) {
    const Grid3& g = n2.grid;
    const double k = sol.k;
    const double R = plane.z;
    double b = std::max({std::abs(g.bbox.x1min), g.bbox.x1max, std::abs(g.bbox.x2min), g.bbox.x2max});
    if (R < 5.0 * std::max(b, 1.0))
        std::cerr << "warning: far_field_plane at R = " << R << " with b = " << b
                  << "; far-field assumption R >> max(b,1) is weak\n";
    cdouble integral = 0;
    auto support = contrast_support(n2);
    for (const auto& s : support)
        integral += std::exp(cdouble(0, -k * s.x3)) * s.beta * sol.u.values[s.idx];
    integral *= g.cell_volume();
    cdouble usc = (k * k / (4.0 * M_PI * R)) * std::exp(cdouble(0, k * R)) * integral;
    ComplexPlaneData out(plane, {k});
    std::fill(out.values.begin(), out.values.end(), usc);
    return out;
}

double phi_of_k(const ComplexPlaneData& data, double k) {
    std::size_t ki = data.k_values.size();
    for (std::size_t i = 0; i < data.k_values.size(); ++i)
        if (data.k_values[i] == k) { ki = i; break; }
    if (ki == data.k_values.size())
        throw std::invalid_argument("phi_of_k: k not present in the plane data");
    cdouble inc = incident(data.plane.z, k);
    const cdouble* u = data.slice(ki);
    double phi = 0;
    for (std::size_t p = 0; p < data.plane.size(); ++p)
        phi = std::max(phi, std::norm(u[p] - inc));
    return phi;
}

double analytic_bound(double k, double R, int sphere_count) {
    if (R <= 0) throw std::invalid_argument("analytic_bound: R must be > 0");
    if (sphere_count < 1) throw std::invalid_argument("analytic_bound: count must be >= 1");
    double t = sphere_count * k / (4.0 * M_PI * R);
    return t * t;
}

void solution_gradient(const ForwardSolution& sol, const RealField3& n2,
                       const GreenConvolver& conv, std::vector<cdouble>& g1,
                       std::vector<cdouble>& g2, std::vector<cdouble>& g3) {
    const Grid3& g = n2.grid;
    const double k = sol.k;
    std::vector<cdouble> src(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        src[i] = (n2.values[i] - 1.0) * sol.u.values[i];
    conv.apply_gradient(src, g1, g2, g3);
    const double k2 = k * k;
    for (int l = 0; l < g.n3; ++l) {
        cdouble dinc = cdouble(0, k) * incident(g.x3(l), k);
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t id = g.idx(i, j, l);
                g1[id] *= k2;
                g2[id] *= k2;
                g3[id] = k2 * g3[id] + dinc;
            }
    }
}

ComplexPlaneData born_reference(const RealField3& n2, double k, const PlaneGrid& plane) {
    const Grid3& g = n2.grid;
    auto support = contrast_support(n2);
    const double w = g.cell_volume() * k * k;
    ComplexPlaneData out(plane, {k});
    cdouble* dst = out.slice(0);
    for (int j = 0; j < plane.m2; ++j)
        for (int i = 0; i < plane.m1; ++i) {
            double x1 = plane.x1(i), x2 = plane.x2(j), x3 = plane.z;
            cdouble acc = 0;
            for (const auto& s : support) {
                double r = std::sqrt((x1 - s.x1) * (x1 - s.x1) + (x2 - s.x2) * (x2 - s.x2) +
                                     (x3 - s.x3) * (x3 - s.x3));
                acc += s.beta * incident(s.x3, k) * std::exp(cdouble(0, k * r)) / (4.0 * M_PI * r);
            }
            dst[plane.idx(i, j)] = incident(x3, k) + w * acc;
        }
    return out;
}

}  // namespace psir
