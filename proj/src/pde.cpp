#include "psir/pde.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

#include "psir/krylov.hpp"

namespace psir {

namespace {

bool is_boundary(const Grid3& g, int i, int j, int l) {
    return i == 0 || j == 0 || l == 0 || i == g.n1 - 1 || j == g.n2 - 1 || l == g.n3 - 1;
}

// Tridiagonal LU with partial pivoting (gtsv-style); stable for the
// convection-dominated systems below where the diagonal is not dominant.
struct TriSolver {
    int n = 0;
    std::vector<cdouble> dl, dd, du, du2;
    std::vector<int> swapped;

    void factor(cdouble lower, cdouble diag, cdouble upper, int size) {
        n = size;
        dl.assign(n, lower);
        dd.assign(n, diag);
        du.assign(n, upper);
        du2.assign(n, 0.0);
        swapped.assign(n, 0);
        dl[0] = 0.0;  // dl[i] couples row i to row i-1
        for (int i = 0; i < n - 1; ++i) {
            cdouble sub = dl[i + 1];
            if (std::abs(dd[i]) >= std::abs(sub)) {
                cdouble fact = std::abs(dd[i]) > 0 ? sub / dd[i] : cdouble(0);
                dl[i + 1] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                swapped[i] = 1;
                cdouble fact = dd[i] / sub;
                dd[i] = sub;
                dl[i + 1] = fact;
                cdouble tmp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = tmp - fact * dd[i + 1];
                if (i < n - 2) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
    }

    // in-place solve with the given stride between consecutive entries
    void solve(cdouble* b, std::size_t stride) const {
        auto at = [&](int i) -> cdouble& { return b[std::size_t(i) * stride]; };
        for (int i = 0; i < n - 1; ++i) {
            if (!swapped[i]) {
                at(i + 1) -= dl[i + 1] * at(i);
            } else {
                cdouble tmp = at(i);
                at(i) = at(i + 1);
                at(i + 1) = tmp - dl[i + 1] * at(i + 1);
            }
        }
        at(n - 1) /= dd[n - 1];
        if (n > 1) at(n - 2) = (at(n - 2) - du[n - 2] * at(n - 1)) / dd[n - 2];
        for (int i = n - 3; i >= 0; --i)
            at(i) = (at(i) - du[i] * at(i + 1) - du2[i] * at(i + 2)) / dd[i];
    }
};

// Exact inverse of d * lap + b3 * d/dx3 with homogeneous Dirichlet data on the
// interior block: sine transform across x1, x2 decouples the transverse modes,
// leaving one pivoted tridiagonal system per mode along x3.
class DriftPreconditioner {
  public:
    DriftPreconditioner(const Grid3& g, cdouble diffusion, cdouble b3, cdouble shift)
        : m1_(g.n1 - 2), m2_(g.n2 - 2), m3_(g.n3 - 2) {
        slab_.assign(std::size_t(m1_) * m2_, 0.0);
        plan_ = fftw_plan_r2r_2d(m2_, m1_, slab_.data(), slab_.data(), FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE);
        const double ih1 = 1.0 / (g.h1() * g.h1());
        const double ih2 = 1.0 / (g.h2() * g.h2());
        const double h3 = g.h3();
        const cdouble lower = diffusion / (h3 * h3) - b3 / (2 * h3);
        const cdouble upper = diffusion / (h3 * h3) + b3 / (2 * h3);
        solvers_.resize(std::size_t(m1_) * m2_);
        for (int j = 0; j < m2_; ++j)
            for (int i = 0; i < m1_; ++i) {
                double s1 = std::sin(M_PI * (i + 1) / (2.0 * (m1_ + 1)));
                double s2 = std::sin(M_PI * (j + 1) / (2.0 * (m2_ + 1)));
                double lam = 4.0 * ih1 * s1 * s1 + 4.0 * ih2 * s2 * s2;
                cdouble diag = diffusion * (-2.0 / (h3 * h3)) - diffusion * lam + shift;
                solvers_[std::size_t(i) + std::size_t(m1_) * j].factor(lower, diag, upper, m3_);
            }
        hat_.assign(std::size_t(m1_) * m2_ * m3_, 0.0);
    }
    ~DriftPreconditioner() { fftw_destroy_plan(static_cast<fftw_plan>(plan_)); }
    DriftPreconditioner(const DriftPreconditioner&) = delete;
    DriftPreconditioner& operator=(const DriftPreconditioner&) = delete;

    // z = M^{-1} r on interior-index arrays
    void apply(const std::vector<cdouble>& r, std::vector<cdouble>& z) {
        const std::size_t ns = std::size_t(m1_) * m2_;
        for (int l = 0; l < m3_; ++l) {
            const cdouble* src = &r[ns * l];
            for (int part = 0; part < 2; ++part) {
                for (std::size_t p = 0; p < ns; ++p)
                    slab_[p] = part == 0 ? src[p].real() : src[p].imag();
                fftw_execute(static_cast<fftw_plan>(plan_));
                if (part == 0)
                    for (std::size_t p = 0; p < ns; ++p) hat_[ns * l + p] = slab_[p];
                else
                    for (std::size_t p = 0; p < ns; ++p) hat_[ns * l + p] += cdouble(0, slab_[p]);
            }
        }
        for (std::size_t p = 0; p < ns; ++p) solvers_[p].solve(&hat_[p], ns);
        const double scale = 1.0 / (4.0 * (m1_ + 1) * (m2_ + 1));
        z.resize(hat_.size());
        for (int l = 0; l < m3_; ++l) {
            for (int part = 0; part < 2; ++part) {
                for (std::size_t p = 0; p < ns; ++p)
                    slab_[p] = part == 0 ? hat_[ns * l + p].real() : hat_[ns * l + p].imag();
                fftw_execute(static_cast<fftw_plan>(plan_));
                if (part == 0)
                    for (std::size_t p = 0; p < ns; ++p) z[ns * l + p] = scale * slab_[p];
                else
                    for (std::size_t p = 0; p < ns; ++p)
                        z[ns * l + p] += cdouble(0, scale * slab_[p]);
            }
        }
    }

  private:
    int m1_, m2_, m3_;
    std::vector<double> slab_;
    std::vector<cdouble> hat_;
    std::vector<TriSolver> solvers_;
    void* plan_ = nullptr;
};

}  // namespace

ComplexField3 solve_dirichlet(const DirichletProblem& problem, PdeReport* report,
                              double tolerance, int max_iterations) {
    if (!problem.grid) throw std::invalid_argument("solve_dirichlet: grid required");
    const Grid3& g = *problem.grid;
    const std::size_t total = g.size();
    if (problem.rhs.size() != total || problem.boundary.size() != total)
        throw std::invalid_argument("solve_dirichlet: rhs/boundary size mismatch");
    const bool has_drift = !problem.drift1.empty();
    if (has_drift && (problem.drift1.size() != total || problem.drift2.size() != total ||
                      problem.drift3.size() != total))
        throw std::invalid_argument("solve_dirichlet: drift size mismatch");

    const int m1 = g.n1 - 2, m2 = g.n2 - 2, m3 = g.n3 - 2;
    if (m1 <= 0 || m2 <= 0 || m3 <= 0)
        throw std::invalid_argument("solve_dirichlet: grid has no interior");
    const std::size_t interior = std::size_t(m1) * m2 * m3;
    const double ih1 = 1.0 / (g.h1() * g.h1());
    const double ih2 = 1.0 / (g.h2() * g.h2());
    const double ih3 = 1.0 / (g.h3() * g.h3());
    const double c1 = 1.0 / (2 * g.h1()), c2 = 1.0 / (2 * g.h2()), c3 = 1.0 / (2 * g.h3());
    const cdouble d = problem.diffusion;
    const cdouble ds = problem.drift_scale;

    auto gidx = [&](int i, int j, int l) { return g.idx(i + 1, j + 1, l + 1); };
    auto iidx = [&](int i, int j, int l) {
        return std::size_t(i) + std::size_t(m1) * (std::size_t(j) + std::size_t(m2) * l);
    };

    double max_peclet = 0;
    if (has_drift && std::abs(d) > 0) {
        const double h = std::max({g.h1(), g.h2(), g.h3()});
        for (int l = 0; l < m3; ++l)
            for (int j = 0; j < m2; ++j)
                for (int i = 0; i < m1; ++i) {
                    std::size_t p = gidx(i, j, l);
                    double mag = std::sqrt(std::norm(problem.drift1[p]) +
                                           std::norm(problem.drift2[p]) +
                                           std::norm(problem.drift3[p]));
                    max_peclet = std::max(max_peclet,
                                          std::abs(ds) * mag * h / (2 * std::abs(d)));
                }
    }

    // stencil application on a full-grid scratch field whose boundary ring is zero;
    // boundary contributions are lifted into the rhs below
    std::vector<cdouble> full(total, 0.0);
    auto apply = [&](const std::vector<cdouble>& x, std::vector<cdouble>& y) {
        for (int l = 0; l < m3; ++l)
            for (int j = 0; j < m2; ++j)
                for (int i = 0; i < m1; ++i) full[gidx(i, j, l)] = x[iidx(i, j, l)];
        for (int l = 0; l < m3; ++l)
            for (int j = 0; j < m2; ++j)
                for (int i = 0; i < m1; ++i) {
                    std::size_t p = gidx(i, j, l);
                    cdouble u = full[p];
                    cdouble ux_m = full[p - 1], ux_p = full[p + 1];
                    cdouble uy_m = full[p - g.n1], uy_p = full[p + g.n1];
                    cdouble uz_m = full[p - std::size_t(g.n1) * g.n2];
                    cdouble uz_p = full[p + std::size_t(g.n1) * g.n2];
                    cdouble lap = (ux_m - 2.0 * u + ux_p) * ih1 + (uy_m - 2.0 * u + uy_p) * ih2 +
                                  (uz_m - 2.0 * u + uz_p) * ih3;
                    cdouble val = d * lap + problem.shift * u;
                    if (has_drift) {
                        cdouble adv = problem.drift1[p] * (ux_p - ux_m) * c1 +
                                      problem.drift2[p] * (uy_p - uy_m) * c2 +
                                      problem.drift3[p] * (uz_p - uz_m) * c3;
                        val += ds * adv;
                    }
                    y[iidx(i, j, l)] = val;
                }
    };
    // the boundary extension is zero on interior nodes, so the shift term
    // contributes nothing to the lift below

    // rhs with boundary lift: b = rhs - A(boundary extension)
    std::vector<cdouble> bext(total, 0.0);
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                if (is_boundary(g, i, j, l)) bext[g.idx(i, j, l)] = problem.boundary[g.idx(i, j, l)];
    std::vector<cdouble> b(interior);
    for (int l = 0; l < m3; ++l)
        for (int j = 0; j < m2; ++j)
            for (int i = 0; i < m1; ++i) {
                std::size_t p = gidx(i, j, l);
                cdouble u = bext[p];
                cdouble ux_m = bext[p - 1], ux_p = bext[p + 1];
                cdouble uy_m = bext[p - g.n1], uy_p = bext[p + g.n1];
                cdouble uz_m = bext[p - std::size_t(g.n1) * g.n2];
                cdouble uz_p = bext[p + std::size_t(g.n1) * g.n2];
                cdouble lap = (ux_m - 2.0 * u + ux_p) * ih1 + (uy_m - 2.0 * u + uy_p) * ih2 +
                              (uz_m - 2.0 * u + uz_p) * ih3;
                cdouble val = d * lap;
                if (has_drift) {
                    cdouble adv = problem.drift1[p] * (ux_p - ux_m) * c1 +
                                  problem.drift2[p] * (uy_p - uy_m) * c2 +
                                  problem.drift3[p] * (uz_p - uz_m) * c3;
                    val += ds * adv;
                }
                b[iidx(i, j, l)] = problem.rhs[p] - val;
            }

    std::vector<cdouble> x(interior, 0.0);
    KrylovReport kr;
    cdouble bbar3 = 0;
    if (has_drift) {
        for (int l = 0; l < m3; ++l)
            for (int j = 0; j < m2; ++j)
                for (int i = 0; i < m1; ++i) bbar3 += problem.drift3[gidx(i, j, l)];
        bbar3 *= ds / double(interior);
    }
    const double axial_peclet = std::abs(d) > 0 ? std::abs(bbar3) * g.h3() / (2 * std::abs(d)) : 0;
    if (has_drift && axial_peclet > 0.25) {
        // convection-dominated: right-precondition with the exact inverse of
        // the mean-drift operator so BiCGStab only has to fight the remainder
        DriftPreconditioner M(g, d, bbar3, problem.shift);
        std::vector<cdouble> y(interior, 0.0), tmp(interior);
        auto apply_right = [&](const std::vector<cdouble>& in, std::vector<cdouble>& out) {
            M.apply(in, tmp);
            apply(tmp, out);
        };
        kr = bicgstab(apply_right, b, y, tolerance, max_iterations);
        M.apply(y, x);
    } else {
        kr = bicgstab(apply, b, x, tolerance, max_iterations);
    }
    if (report) {
        report->iterations = kr.iterations;
        report->residual = kr.residual;
        report->converged = kr.converged;
        report->max_cell_peclet = max_peclet;
    }
    if (!kr.converged && kr.residual > problem.acceptable_residual)
        throw std::runtime_error("solve_dirichlet: BiCGStab failed to converge (residual " +
                                 std::to_string(kr.residual) + ")");

    ComplexField3 out(g);
    for (std::size_t p = 0; p < total; ++p) out.values[p] = bext[p];
    for (int l = 0; l < m3; ++l)
        for (int j = 0; j < m2; ++j)
            for (int i = 0; i < m1; ++i) out.values[gidx(i, j, l)] = x[iidx(i, j, l)];
    return out;
}

ComplexField3 solve_laplace(const Grid3& grid, const std::vector<cdouble>& boundary,
                            PdeReport* report, double tolerance, int max_iterations) {
    DirichletProblem prob;
    prob.grid = &grid;
    prob.rhs.assign(grid.size(), 0.0);
    prob.boundary = boundary;
    return solve_dirichlet(prob, report, tolerance, max_iterations);
}

void gradient(const ComplexField3& f, std::vector<cdouble>& g1, std::vector<cdouble>& g2,
              std::vector<cdouble>& g3) {
    const Grid3& g = f.grid;
    const std::size_t total = g.size();
    g1.assign(total, 0.0);
    g2.assign(total, 0.0);
    g3.assign(total, 0.0);
    const double c1 = 1.0 / (2 * g.h1()), c2 = 1.0 / (2 * g.h2()), c3 = 1.0 / (2 * g.h3());
    auto deriv = [](cdouble m, cdouble c, cdouble p, int i, int n, double half) {
        if (i == 0) return (p - c) * (2.0 * half);
        if (i == n - 1) return (c - m) * (2.0 * half);
        return (p - m) * half;
    };
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t p = g.idx(i, j, l);
                cdouble u = f.values[p];
                g1[p] = deriv(i > 0 ? f.values[p - 1] : u, u,
                              i < g.n1 - 1 ? f.values[p + 1] : u, i, g.n1, c1);
                g2[p] = deriv(j > 0 ? f.values[p - g.n1] : u, u,
                              j < g.n2 - 1 ? f.values[p + g.n1] : u, j, g.n2, c2);
                std::size_t s = std::size_t(g.n1) * g.n2;
                g3[p] = deriv(l > 0 ? f.values[p - s] : u, u,
                              l < g.n3 - 1 ? f.values[p + s] : u, l, g.n3, c3);
            }
}

void divergence(const Grid3& g, const std::vector<cdouble>& g1, const std::vector<cdouble>& g2,
                const std::vector<cdouble>& g3, std::vector<cdouble>& out) {
    const std::size_t total = g.size();
    if (g1.size() != total || g2.size() != total || g3.size() != total)
        throw std::invalid_argument("divergence: size mismatch");
    out.assign(total, 0.0);
    const double c1 = 1.0 / (2 * g.h1()), c2 = 1.0 / (2 * g.h2()), c3 = 1.0 / (2 * g.h3());
    auto deriv = [](cdouble m, cdouble c, cdouble p, int i, int n, double half) {
        if (i == 0) return (p - c) * (2.0 * half);
        if (i == n - 1) return (c - m) * (2.0 * half);
        return (p - m) * half;
    };
    const std::size_t s = std::size_t(g.n1) * g.n2;
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                std::size_t p = g.idx(i, j, l);
                cdouble d1 = deriv(i > 0 ? g1[p - 1] : g1[p], g1[p],
                                   i < g.n1 - 1 ? g1[p + 1] : g1[p], i, g.n1, c1);
                cdouble d2 = deriv(j > 0 ? g2[p - g.n1] : g2[p], g2[p],
                                   j < g.n2 - 1 ? g2[p + g.n1] : g2[p], j, g.n2, c2);
                cdouble d3 = deriv(l > 0 ? g3[p - s] : g3[p], g3[p],
                                   l < g.n3 - 1 ? g3[p + s] : g3[p], l, g.n3, c3);
                out[p] = d1 + d2 + d3;
            }
}

}  // namespace psir
