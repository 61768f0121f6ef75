#ifndef RINGFC_VOIGT_HPP
#define RINGFC_VOIGT_HPP

#include <cmath>
#include <complex>

#include "ringfc/constants.hpp"

namespace ringfc {

// Humlicek's four-region rational approximation of the complex probability
// function w(z) = exp(-z^2) erfc(-iz), valid for Im(z) >= 0 with relative
// accuracy better than ~1e-4 across the plane (J. Quant. Spectrosc. Radiat.
// Transfer 27, 437 (1982)).
inline std::complex<double> faddeeva_w4(std::complex<double> z) {
    using cd = std::complex<double>;
    const double x = z.real();
    const double y = z.imag();
    const cd t{y, -x};
    const double s = std::abs(x) + y;
    if (s >= 15.0) {
        return t * 0.5641896 / (0.5 + t * t);
    }
    if (s >= 5.5) {
        const cd u = t * t;
        return t * (1.410474 + u * 0.5641896) / (0.75 + u * (3.0 + u));
    }
    if (y >= 0.195 * std::abs(x) - 0.176) {
        return (16.4955 + t * (20.20933 + t * (11.96482 + t * (3.778987 + t * 0.5642236)))) /
               (16.4955 + t * (38.82363 + t * (39.27121 + t * (21.69274 + t * (6.699398 + t)))));
    }
    const cd u = t * t;
    const cd num = t * (36183.31 - u * (3321.9905 - u * (1540.787 - u * (219.0313 - u *
                   (35.76683 - u * (1.320522 - u * 0.56419))))));
    const cd den = 32066.6 - u * (24322.84 - u * (9022.228 - u * (2186.181 - u *
                   (364.2191 - u * (61.57037 - u * (1.841439 - u))))));
    return std::exp(u) - num / den;
}

// Normalized Voigt density at offset f from center, parameterized by the
// FWHM of its Lorentzian and Gaussian components. Degenerate limits fall
// back to the exact single-component densities.
inline double voigt_density(double f, double fwhm_lorentz, double fwhm_gauss) {
    const double gamma = 0.5 * fwhm_lorentz;
    const double sigma = fwhm_gauss / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    if (sigma <= 1e-12 * std::max(gamma, 1.0)) {
        return gamma / (kPi * (f * f + gamma * gamma));
    }
    if (gamma <= 1e-12 * sigma) {
        const double zz = f / sigma;
        return std::exp(-0.5 * zz * zz) / (sigma * std::sqrt(kTwoPi));
    }
    const std::complex<double> z{f / (sigma * std::sqrt(2.0)), gamma / (sigma * std::sqrt(2.0))};
    return faddeeva_w4(z).real() / (sigma * std::sqrt(kTwoPi));
}

// Olivero-Longbothum width combination, accurate to ~0.02 %:
//   FWHM_V ~= 0.5346 FL + sqrt(0.2166 FL^2 + FG^2)
inline double voigt_fwhm(double fwhm_lorentz, double fwhm_gauss) {
    return 0.5346 * fwhm_lorentz +
           std::sqrt(0.2166 * fwhm_lorentz * fwhm_lorentz + fwhm_gauss * fwhm_gauss);
}

} // namespace ringfc

#endif // RINGFC_VOIGT_HPP
