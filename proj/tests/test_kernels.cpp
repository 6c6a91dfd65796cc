#include <doctest.h>

#include <random>
#include <vector>

#include "psir/kernels.hpp"

using namespace psir;
using kern::cdouble;
using kern::Isa;

namespace {

std::vector<cdouble> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<cdouble> v(n);
    for (auto& z : v) z = cdouble(d(rng), d(rng));
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match straightforward loops") {
    kern::force_isa(Isa::scalar);
    auto x = random_vec(257, 1), y = random_vec(257, 2);
    cdouble a(0.3, -0.7);

    auto y1 = y;
    kern::zaxpy(a, x.data(), y1.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y1[i] - (y[i] + a * x[i])) < 1e-15);

    auto y2 = y;
    kern::zxpay(a, x.data(), y2.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y2[i] - (x[i] + a * y[i])) < 1e-15);

    std::vector<cdouble> prod(x.size());
    kern::zmul(x.data(), y.data(), prod.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(prod[i] - x[i] * y[i]) < 1e-15);

    cdouble dot = kern::zdotc(x.data(), y.data(), x.size());
    cdouble ref = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ref += std::conj(x[i]) * y[i];
    CHECK(std::abs(dot - ref) < 1e-12);
    kern::force_isa(Isa::scalar);  // leave deterministic state
}

TEST_CASE("avx2 kernels agree with scalar bit-for-bit friendly tolerances") {
    if (!kern::avx2_available()) return;
    for (std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64), std::size_t(1025),
                          std::size_t(4099)}) {
        auto x = random_vec(n, 10 + n), y = random_vec(n, 20 + n);
        std::vector<double> r(n);
        std::mt19937_64 rng(30 + n);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& v : r) v = d(rng);
        cdouble a(1.25, -2.5);

        kern::force_isa(Isa::scalar);
        auto y_s = y;
        kern::zaxpy(a, x.data(), y_s.data(), n);
        std::vector<cdouble> mul_s(n), rm_s(n);
        kern::zmul(x.data(), y.data(), mul_s.data(), n);
        kern::rzmul(r.data(), x.data(), rm_s.data(), n);
        cdouble dot_s = kern::zdotc(x.data(), y.data(), n);
        double nrm_s = kern::znorm2sq(x.data(), n);

        kern::force_isa(Isa::avx2);
        auto y_v = y;
        kern::zaxpy(a, x.data(), y_v.data(), n);
        std::vector<cdouble> mul_v(n), rm_v(n);
        kern::zmul(x.data(), y.data(), mul_v.data(), n);
        kern::rzmul(r.data(), x.data(), rm_v.data(), n);
        cdouble dot_v = kern::zdotc(x.data(), y.data(), n);
        double nrm_v = kern::znorm2sq(x.data(), n);
        kern::force_isa(Isa::scalar);

        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(y_s[i] - y_v[i]) < 1e-14);
            CHECK(std::abs(mul_s[i] - mul_v[i]) < 1e-14);
            CHECK(std::abs(rm_s[i] - rm_v[i]) < 1e-14);
        }
        CHECK(std::abs(dot_s - dot_v) <= 1e-12 * (1 + std::abs(dot_s)));
        CHECK(nrm_s == doctest::Approx(nrm_v).epsilon(1e-12));
    }
}

TEST_CASE("blocked reductions are order-deterministic") {
    auto x = random_vec(10000, 42);
    cdouble first = kern::zdotc(x.data(), x.data(), x.size());
    for (int rep = 0; rep < 5; ++rep)
        CHECK(kern::zdotc(x.data(), x.data(), x.size()) == first);
    // accumulator identity: zdotc(x, x) is the squared norm
    CHECK(first.real() == doctest::Approx(kern::znorm2sq(x.data(), x.size())));
    CHECK(std::abs(first.imag()) < 1e-9);
}
