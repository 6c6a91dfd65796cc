#include "psir/fft.hpp"

#include <fftw3.h>

#include <cmath>

#include "psir/kernels.hpp"

namespace psir {

int next_fast_size(int n) {
    if (n < 2) return 2;
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

namespace {
fftw_plan make_plan_3d(int n1, int n2, int n3, int sign) {
    std::vector<cdouble> probe(std::size_t(n1) * n2 * n3);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    // x1-fastest storage means fftw's last dimension is n1
    return fftw_plan_dft_3d(n3, n2, n1, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
}
fftw_plan make_plan_2d(int n1, int n2, int sign) {
    std::vector<cdouble> probe(std::size_t(n1) * n2);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    return fftw_plan_dft_2d(n2, n1, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
}
void run(void* plan, cdouble* data) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
}
}  // namespace

Fft3::Fft3(int n1, int n2, int n3)
    : n1_(n1), n2_(n2), n3_(n3),
      plan_fwd_(make_plan_3d(n1, n2, n3, FFTW_FORWARD)),
      plan_inv_(make_plan_3d(n1, n2, n3, FFTW_BACKWARD)) {}

Fft3::~Fft3() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Fft3::forward(cdouble* data) const { run(plan_fwd_, data); }

void Fft3::inverse(cdouble* data) const {
    run(plan_inv_, data);
    double scale = 1.0 / double(size());
    for (std::size_t i = 0; i < size(); ++i) data[i] *= scale;
}

Fft2::Fft2(int n1, int n2)
    : n1_(n1), n2_(n2),
      plan_fwd_(make_plan_2d(n1, n2, FFTW_FORWARD)),
      plan_inv_(make_plan_2d(n1, n2, FFTW_BACKWARD)) {}

Fft2::~Fft2() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Fft2::forward(cdouble* data) const { run(plan_fwd_, data); }

void Fft2::inverse(cdouble* data) const {
    run(plan_inv_, data);
    double scale = 1.0 / double(size());
    for (std::size_t i = 0; i < size(); ++i) data[i] *= scale;
}

GreenConvolver::GreenConvolver(const Grid3& grid, double k)
    : grid_(grid), k_(k),
      p1_(next_fast_size(2 * grid.n1)),
      p2_(next_fast_size(2 * grid.n2)),
      p3_(next_fast_size(2 * grid.n3)),
      fft_(p1_, p2_, p3_),
      kernel_hat_(std::size_t(p1_) * p2_ * p3_),
      work_(kernel_hat_.size()) {
    const double h1 = grid.h1(), h2 = grid.h2(), h3 = grid.h3();
    const double vol = grid.cell_volume();
    // equal-volume ball for the singular cell
    const double a = std::cbrt(3.0 * vol / (4.0 * M_PI));
    cdouble self;
    if (k * a < 1e-8) {
        self = 0.5 * a * a;
    } else {
        // integral of exp(ikr)/(4 pi r) over the ball of radius a
        self = (std::exp(cdouble(0, k * a)) * cdouble(1.0, -k * a) - 1.0) / (k * k);
    }
    for (int l = 0; l < p3_; ++l) {
        int d3 = l <= p3_ / 2 ? l : l - p3_;
        for (int j = 0; j < p2_; ++j) {
            int d2 = j <= p2_ / 2 ? j : j - p2_;
            for (int i = 0; i < p1_; ++i) {
                int d1 = i <= p1_ / 2 ? i : i - p1_;
                std::size_t idx = std::size_t(i) + std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l);
                if (d1 == 0 && d2 == 0 && d3 == 0) {
                    kernel_hat_[idx] = self;
                } else {
                    double r = std::sqrt(d1 * h1 * d1 * h1 + d2 * h2 * d2 * h2 + d3 * h3 * d3 * h3);
                    kernel_hat_[idx] = vol * std::exp(cdouble(0, k * r)) / (4.0 * M_PI * r);
                }
            }
        }
    }
    fft_.forward(kernel_hat_.data());
}

void GreenConvolver::apply(const std::vector<cdouble>& in, std::vector<cdouble>& out) const {
    if (in.size() != grid_.size())
        throw std::invalid_argument("GreenConvolver::apply: size mismatch");
    std::fill(work_.begin(), work_.end(), cdouble(0));
    for (int l = 0; l < grid_.n3; ++l)
        for (int j = 0; j < grid_.n2; ++j) {
            const cdouble* src = &in[grid_.idx(0, j, l)];
            cdouble* dst = &work_[std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l)];
            std::copy(src, src + grid_.n1, dst);
        }
    fft_.forward(work_.data());
    kern::zmul(work_.data(), kernel_hat_.data(), work_.data(), work_.size());
    fft_.inverse(work_.data());
    out.resize(grid_.size());
    for (int l = 0; l < grid_.n3; ++l)
        for (int j = 0; j < grid_.n2; ++j) {
            const cdouble* src = &work_[std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l)];
            std::copy(src, src + grid_.n1, &out[grid_.idx(0, j, l)]);
        }
}

void GreenConvolver::build_gradient_kernels() const {
    const double h1 = grid_.h1(), h2 = grid_.h2(), h3 = grid_.h3();
    const double vol = grid_.cell_volume();
    for (auto& g : grad_hat_) g.assign(kernel_hat_.size(), cdouble(0));
    for (int l = 0; l < p3_; ++l) {
        int d3 = l <= p3_ / 2 ? l : l - p3_;
        for (int j = 0; j < p2_; ++j) {
            int d2 = j <= p2_ / 2 ? j : j - p2_;
            for (int i = 0; i < p1_; ++i) {
                int d1 = i <= p1_ / 2 ? i : i - p1_;
                if (d1 == 0 && d2 == 0 && d3 == 0) continue;  // odd kernel: zero self term
                std::size_t idx = std::size_t(i) + std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l);
                double x1 = d1 * h1, x2 = d2 * h2, x3 = d3 * h3;
                double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                cdouble radial = vol * cdouble(-1.0 / r, k_) * std::exp(cdouble(0, k_ * r)) /
                                 (4.0 * M_PI * r * r);
                grad_hat_[0][idx] = x1 * radial;
                grad_hat_[1][idx] = x2 * radial;
                grad_hat_[2][idx] = x3 * radial;
            }
        }
    }
    for (auto& g : grad_hat_) fft_.forward(g.data());
}

void GreenConvolver::apply_gradient(const std::vector<cdouble>& in, std::vector<cdouble>& g1,
                                    std::vector<cdouble>& g2, std::vector<cdouble>& g3) const {
    if (in.size() != grid_.size())
        throw std::invalid_argument("GreenConvolver::apply_gradient: size mismatch");
    if (grad_hat_[0].empty()) build_gradient_kernels();
    std::fill(work_.begin(), work_.end(), cdouble(0));
    for (int l = 0; l < grid_.n3; ++l)
        for (int j = 0; j < grid_.n2; ++j) {
            const cdouble* src = &in[grid_.idx(0, j, l)];
            cdouble* dst = &work_[std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l)];
            std::copy(src, src + grid_.n1, dst);
        }
    fft_.forward(work_.data());
    std::vector<cdouble> spec(work_);
    std::vector<cdouble>* outs[3] = {&g1, &g2, &g3};
    for (int c = 0; c < 3; ++c) {
        kern::zmul(spec.data(), grad_hat_[c].data(), work_.data(), work_.size());
        fft_.inverse(work_.data());
        outs[c]->resize(grid_.size());
        for (int l = 0; l < grid_.n3; ++l)
            for (int j = 0; j < grid_.n2; ++j) {
                const cdouble* src = &work_[std::size_t(p1_) * (std::size_t(j) + std::size_t(p2_) * l)];
                std::copy(src, src + grid_.n1, &(*outs[c])[grid_.idx(0, j, l)]);
            }
    }
}

}  // namespace psir
