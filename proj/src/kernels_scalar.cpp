#include "kernels_internal.hpp"

namespace psir::kern::scalar {

void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = r[i] * z[i];
}

cdouble zdotc_block(const cdouble* x, const cdouble* y, std::size_t n) {
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

double znorm2sq_block(const cdouble* x, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

void abs2(const cdouble* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
}

}  // namespace psir::kern::scalar
