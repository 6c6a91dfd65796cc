#pragma once

#include <vector>

#include "psir/grid.hpp"

namespace psir {

/// Smallest 2^a 3^b 5^c 7^d >= n.
int next_fast_size(int n);

/// Complex-to-complex 3D FFT over x1-fastest storage.
class Fft3 {
  public:
    Fft3(int n1, int n2, int n3);
    ~Fft3();
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    std::size_t size() const { return std::size_t(n1_) * n2_ * n3_; }
    void forward(cdouble* data) const;
    void inverse(cdouble* data) const;  // normalized by 1/size

  private:
    int n1_, n2_, n3_;
    void* plan_fwd_;
    void* plan_inv_;
};

/// Complex-to-complex 2D FFT, x1-fastest storage.
class Fft2 {
  public:
    Fft2(int n1, int n2);
    ~Fft2();
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    std::size_t size() const { return std::size_t(n1_) * n2_; }
    void forward(cdouble* data) const;
    void inverse(cdouble* data) const;

  private:
    int n1_, n2_;
    void* plan_fwd_;
    void* plan_inv_;
};

/// Discrete free-space Green-kernel convolution k^2-free part:
/// (K f)(x) = sum_xi w(x - xi) f(xi) with w the cellwise quadrature of
/// exp(ik r)/(4 pi r), realized by FFT on a padded cell at least twice the
/// grid extent per axis. The singular cell uses the exact integral of the
/// kernel over an equal-volume ball.
class GreenConvolver {
  public:
    GreenConvolver(const Grid3& grid, double k);

    double k() const { return k_; }
    const Grid3& grid() const { return grid_; }

    /// out = K in, both on the grid. out may alias in.
    void apply(const std::vector<cdouble>& in, std::vector<cdouble>& out) const;

    /// g_j = (d_j K) in: convolution with the analytic kernel gradient
    /// (x_j/r)(ik - 1/r) exp(ikr)/(4 pi r); the singular cell contributes
    /// zero by odd symmetry. Kernels are built on first use.
    void apply_gradient(const std::vector<cdouble>& in, std::vector<cdouble>& g1,
                        std::vector<cdouble>& g2, std::vector<cdouble>& g3) const;

  private:
    void build_gradient_kernels() const;

    Grid3 grid_;
    double k_;
    int p1_, p2_, p3_;
    Fft3 fft_;
    std::vector<cdouble> kernel_hat_;
    mutable std::vector<cdouble> grad_hat_[3];
    mutable std::vector<cdouble> work_;
};

}  // namespace psir
