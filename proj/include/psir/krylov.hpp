#pragma once

#include <cmath>
#include <vector>

#include "psir/kernels.hpp"

namespace psir {

struct KrylovReport {
    int iterations = 0;
    double residual = 0;  // relative to ||b||
    bool converged = false;
};

/// Matrix-free BiCGStab for non-Hermitian complex systems. Op is
/// void(const vector&, vector&). x holds the initial guess on entry and the
/// best iterate on exit. Converges when ||b - Ax|| / ||b|| <= tol.
template <class Op>
KrylovReport bicgstab(Op&& apply, const std::vector<std::complex<double>>& b,
                      std::vector<std::complex<double>>& x, double tol, int max_iter) {
    using kern::zaxpy;
    using kern::zdotc;
    using kern::znorm2sq;
    const std::size_t n = b.size();
    std::vector<std::complex<double>> r(n), rhat(n), p(n), v(n), s(n), t(n), ax(n);

    apply(x, ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    rhat = r;
    double bnorm = std::sqrt(znorm2sq(b.data(), n));
    if (bnorm == 0) bnorm = 1;
    double rnorm = std::sqrt(znorm2sq(r.data(), n));
    KrylovReport rep;
    rep.residual = rnorm / bnorm;
    if (rep.residual <= tol) {
        rep.converged = true;
        return rep;
    }

    std::complex<double> rho = 1, alpha = 1, omega = 1;
    p.assign(n, 0);
    v.assign(n, 0);
    for (int it = 1; it <= max_iter; ++it) {
        std::complex<double> rho1 = zdotc(rhat.data(), r.data(), n);
        if (std::abs(rho1) < 1e-300) break;  // serious breakdown
        std::complex<double> beta = (rho1 / rho) * (alpha / omega);
        rho = rho1;
        // p = r + beta * (p - omega * v)
        zaxpy(-omega, v.data(), p.data(), n);
        kern::zxpay(beta, r.data(), p.data(), n);
        apply(p, v);
        alpha = rho / zdotc(rhat.data(), v.data(), n);
        s = r;
        zaxpy(-alpha, v.data(), s.data(), n);
        double snorm = std::sqrt(znorm2sq(s.data(), n));
        if (snorm / bnorm <= tol) {
            zaxpy(alpha, p.data(), x.data(), n);
            rep.iterations = it;
            rep.residual = snorm / bnorm;
            rep.converged = true;
            return rep;
        }
        apply(s, t);
        std::complex<double> tt = zdotc(t.data(), t.data(), n);
        if (std::abs(tt) < 1e-300) break;
        omega = zdotc(t.data(), s.data(), n) / tt;
        zaxpy(alpha, p.data(), x.data(), n);
        zaxpy(omega, s.data(), x.data(), n);
        r = s;
        zaxpy(-omega, t.data(), r.data(), n);
        rnorm = std::sqrt(znorm2sq(r.data(), n));
        rep.iterations = it;
        rep.residual = rnorm / bnorm;
        if (rep.residual <= tol) {
            rep.converged = true;
            return rep;
        }
        if (std::abs(omega) < 1e-300) break;
    }
    // re-evaluate the true residual for the report
    apply(x, ax);
    for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
    rep.residual = std::sqrt(znorm2sq(ax.data(), n)) / bnorm;
    rep.converged = rep.residual <= tol;
    return rep;
}

}  // namespace psir
