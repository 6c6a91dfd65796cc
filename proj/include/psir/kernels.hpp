#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Data-parallel inner loops shared by the Krylov solvers and the FFT
// convolution paths. A scalar reference implementation always exists; an
// AVX2 variant is selected at runtime when the CPU supports it. Reductions
// use a fixed block size so the summation order does not depend on the
// instruction set beyond lane-level rounding.

namespace psir::kern {

using cdouble = std::complex<double>;

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);  // test hook; also honors PSIR_SIMD=scalar|avx2
bool avx2_available();
std::string isa_name(Isa isa);

/// y[i] += a * x[i]
void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
/// y[i] = x[i] + a * y[i]   (BiCGStab direction update)
void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
/// out[i] = a[i] * b[i]
void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n);
/// out[i] = r[i] * z[i]
void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n);
/// sum conj(x[i]) * y[i], deterministic blocked reduction
cdouble zdotc(const cdouble* x, const cdouble* y, std::size_t n);
/// sum |x[i]|^2
double znorm2sq(const cdouble* x, std::size_t n);
/// out[i] = |x[i]|^2
void abs2(const cdouble* x, double* out, std::size_t n);

}  // namespace psir::kern
