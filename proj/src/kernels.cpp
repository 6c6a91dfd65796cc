#include "kernels_internal.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace psir::kern {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa initial_isa() {
    if (const char* env = std::getenv("PSIR_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Isa::avx2;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

Isa g_isa = initial_isa();

}  // namespace

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_available())
        throw std::runtime_error("force_isa: AVX2 not available on this CPU");
    g_isa = isa;
}

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void zaxpy(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    g_isa == Isa::avx2 ? avx2::zaxpy(a, x, y, n) : scalar::zaxpy(a, x, y, n);
}

void zxpay(cdouble a, const cdouble* x, cdouble* y, std::size_t n) {
    g_isa == Isa::avx2 ? avx2::zxpay(a, x, y, n) : scalar::zxpay(a, x, y, n);
}

void zmul(const cdouble* a, const cdouble* b, cdouble* out, std::size_t n) {
    g_isa == Isa::avx2 ? avx2::zmul(a, b, out, n) : scalar::zmul(a, b, out, n);
}

void rzmul(const double* r, const cdouble* z, cdouble* out, std::size_t n) {
    g_isa == Isa::avx2 ? avx2::rzmul(r, z, out, n) : scalar::rzmul(r, z, out, n);
}

cdouble zdotc(const cdouble* x, const cdouble* y, std::size_t n) {
    cdouble total = 0;
    for (std::size_t off = 0; off < n; off += kBlock) {
        std::size_t len = std::min(kBlock, n - off);
        total += g_isa == Isa::avx2 ? avx2::zdotc_block(x + off, y + off, len)
                                    : scalar::zdotc_block(x + off, y + off, len);
    }
    return total;
}

double znorm2sq(const cdouble* x, std::size_t n) {
    double total = 0;
    for (std::size_t off = 0; off < n; off += kBlock) {
        std::size_t len = std::min(kBlock, n - off);
        total += g_isa == Isa::avx2 ? avx2::znorm2sq_block(x + off, len)
                                    : scalar::znorm2sq_block(x + off, len);
    }
    return total;
}

void abs2(const cdouble* x, double* out, std::size_t n) {
    g_isa == Isa::avx2 ? avx2::abs2(x, out, n) : scalar::abs2(x, out, n);
}

}  // namespace psir::kern
