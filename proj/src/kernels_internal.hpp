#pragma once

#include "psir/kernels.hpp"

namespace psir::kern {

// Reduction block size shared by all variants.
constexpr std::size_t kBlock = 1024;

namespace scalar {
void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n);
void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n);
cdouble zdotc_block(const cdouble* x, const cdouble* y, std::size_t n);
double znorm2sq_block(const cdouble* x, std::size_t n);
void abs2(const cdouble* x, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n);
void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n);
void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n);
cdouble zdotc_block(const cdouble* x, const cdouble* y, std::size_t n);
double znorm2sq_block(const cdouble* x, std::size_t n);
void abs2(const cdouble* x, double* out, std::size_t n);
}  // namespace avx2

}  // namespace psir::kern
