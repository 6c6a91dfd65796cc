#include "psir/mie.hpp"

#include <cmath>

namespace psir {

namespace {

double sph_j(int l, double x) { return std::sph_bessel(unsigned(l), x); }
double sph_y(int l, double x) { return std::sph_neumann(unsigned(l), x); }

// f'(x) = f_{l-1}(x) - (l+1)/x f_l(x); valid for j and y alike
double sph_j_deriv(int l, double x) {
    if (l == 0) return -sph_j(1, x);
    return sph_j(l - 1, x) - (l + 1) / x * sph_j(l, x);
}
double sph_y_deriv(int l, double x) {
    if (l == 0) return -sph_y(1, x);
    return sph_y(l - 1, x) - (l + 1) / x * sph_y(l, x);
}

}  // namespace

MieResult mie_reference(double radius, double n_inside, double k,
                        const std::vector<std::array<double, 3>>& targets, int order) {
    if (radius <= 0 || k <= 0 || n_inside <= 0)
        throw std::invalid_argument("mie_reference: radius, k, n_inside must be > 0");
    const double ka = k * radius;
    int L = order > 0 ? order : int(std::ceil(ka + 10 + 4 * std::cbrt(ka)));

    // scattering coefficients a_l from continuity of u and u' at r = radius
    std::vector<cdouble> a(L + 1);
    double tail = 0;
    for (int l = 0; l <= L; ++l) {
        double ja = sph_j(l, ka), ya = sph_y(l, ka);
        double jad = sph_j_deriv(l, ka), yad = sph_y_deriv(l, ka);
        double jm = sph_j(l, n_inside * ka);
        double jmd = sph_j_deriv(l, n_inside * ka);
        cdouble ha(ja, ya), had(jad, yad);
        // [ h_l(ka)   -j_l(mka)      ] [a_l]   [ -j_l(ka)  ]
        // [ k h_l'    -m k j_l'(mka) ] [c_l] = [ -k j_l'   ]
        cdouble det = ha * (-n_inside * k * jmd) - (-jm) * (k * had);
        if (std::abs(det) < 1e-300) throw std::runtime_error("mie_reference: singular match");
        a[l] = ((-ja) * (-n_inside * k * jmd) - (-jm) * (-k * jad)) / det;
        if (!std::isfinite(a[l].real()) || !std::isfinite(a[l].imag()))
            throw std::runtime_error("mie_reference: non-finite coefficient");
        if (l == L) tail = std::abs(a[l]) * (2 * l + 1);
    }

    MieResult out;
    out.order = L;
    out.tail_bound = tail;
    out.values.resize(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& x = targets[t];
        double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        if (r <= radius) throw std::invalid_argument("mie_reference: target inside the sphere");
        double mu = x[2] / r;  // cos(theta)
        // Legendre recurrence together with the partial-wave sum
        double p_prev = 1.0, p_cur = mu;
        cdouble il(1, 0);  // i^l
        cdouble sum = 0;
        for (int l = 0; l <= L; ++l) {
            double pl = l == 0 ? 1.0 : (l == 1 ? mu : p_cur);
            cdouble radial(sph_j(l, k * r), 0);
            radial += a[l] * cdouble(sph_j(l, k * r), sph_y(l, k * r));
            sum += il * double(2 * l + 1) * radial * pl;
            if (l >= 1) {
                double p_next = ((2 * l + 1) * mu * p_cur - l * p_prev) / (l + 1);
                p_prev = p_cur;
                p_cur = p_next;
            }
            il *= cdouble(0, 1);
        }
        out.values[t] = sum;
    }
    return out;
}

}  // namespace psir
