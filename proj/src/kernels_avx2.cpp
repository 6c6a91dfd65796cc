#include "kernels_internal.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace psir::kern::avx2 {

namespace {

// [ar*br - ai*bi, ar*bi + ai*br] for two packed complex doubles
inline __m256d cmul(__m256d a, __m256d b) {
    __m256d a_re = _mm256_movedup_pd(a);
    __m256d a_im = _mm256_permute_pd(a, 0b1111);
    __m256d b_sw = _mm256_permute_pd(b, 0b0101);
    return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

}  // namespace

void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, cmul(av, xv)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(xv, cmul(av, yv)));
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    double* op = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d av = _mm256_loadu_pd(ap + 2 * i);
        __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        _mm256_storeu_pd(op + 2 * i, cmul(av, bv));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n) {
    const double* zp = reinterpret_cast<const double*>(z);
    double* op = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d rv = _mm256_setr_pd(r[i], r[i], r[i + 1], r[i + 1]);
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        _mm256_storeu_pd(op + 2 * i, _mm256_mul_pd(rv, zv));
    }
    for (; i < n; ++i) out[i] = r[i] * z[i];
}

cdouble zdotc_block(const cdouble* x, const cdouble* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    const double* yp = reinterpret_cast<const double*>(y);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        __m256d y_sw = _mm256_permute_pd(yv, 0b0101);
        // lanes: xr*yr + xi*yi in even slots after horizontal pairing
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);          // xr*yr, xi*yi
        acc_im = _mm256_fmadd_pd(xv, y_sw, acc_im);        // xr*yi, xi*yr
    }
    alignas(32) double re4[4], im4[4];
    _mm256_store_pd(re4, acc_re);
    _mm256_store_pd(im4, acc_im);
    double re = (re4[0] + re4[1]) + (re4[2] + re4[3]);
    double im = (im4[0] - im4[1]) + (im4[2] - im4[3]);
    for (; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

double znorm2sq_block(const cdouble* x, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    alignas(32) double s4[4];
    _mm256_store_pd(s4, acc);
    double s = (s4[0] + s4[1]) + (s4[2] + s4[3]);
    for (; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

void abs2(const cdouble* x, double* out, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d sq = _mm256_mul_pd(xv, xv);
        __m256d sw = _mm256_permute_pd(sq, 0b0101);
        __m256d sum = _mm256_add_pd(sq, sw);  // |x|^2 duplicated in both slots
        out[i] = _mm256_cvtsd_f64(sum);
        out[i + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(sum, 1));
    }
    for (; i < n; ++i)
        out[i] = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
}

}  // namespace psir::kern::avx2

#else

namespace psir::kern::avx2 {
void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n) { scalar::zaxpy(a, x, y, n); }
void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n) { scalar::zxpay(a, x, y, n); }
void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n) { scalar::zmul(a, b, out, n); }
void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n) { scalar::rzmul(r, z, out, n); }
cdouble zdotc_block(const cdouble* x, const cdouble* y, std::size_t n) { return scalar::zdotc_block(x, y, n); }
double znorm2sq_block(const cdouble* x, std::size_t n) { return scalar::znorm2sq_block(x, n); }
void abs2(const cdouble* x, double* out, std::size_t n) { scalar::abs2(x, out, n); }
}  // namespace psir::kern::avx2

#endif
