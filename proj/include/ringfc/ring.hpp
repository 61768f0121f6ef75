#ifndef RINGFC_RING_HPP
#define RINGFC_RING_HPP

#include <cmath>
#include <optional>
#include <string>

#include "ringfc/constants.hpp"
#include "ringfc/errors.hpp"

namespace ringfc {

// Loss/coupling description of one wavelength band of the resonator.
// alpha and theta are the dimensionless per-round-trip rates that enter the
// coupled mode equations:
//   alpha = w_hat * t_R / (2 Q_L)   (total field loss per round trip)
//   theta = w_hat * t_R / Q_c      (power coupling to the access waveguide)
struct BandParams {
    double omega_hat = 0.0;   // band reference resonance, rad/s
    double q_loaded = 0.0;
    double q_intrinsic = 0.0;
    double q_coupling = 0.0;
    double alpha = 0.0;
    double theta = 0.0;

    // Loaded (FWHM) linewidth in Hz.
    double loaded_linewidth_hz() const { return omega_hat / (kTwoPi * q_loaded); }
    double intrinsic_linewidth_hz() const { return omega_hat / (kTwoPi * q_intrinsic); }
    double coupling_linewidth_hz() const { return omega_hat / (kTwoPi * q_coupling); }
};

struct RingParams {
    double round_trip_time = 0.0;  // t_R, s
    double circumference = 0.0;    // L, m
    double radius = 0.0;           // R, m (L = 2 pi R)

    BandParams signal;             // ~917 nm band
    BandParams pump;               // ~1550 nm band

    double gamma_signal = 0.0;     // Kerr coefficient, 1/(W m), signal band
    double gamma_pump = 0.0;       // Kerr coefficient, 1/(W m), pump band

    // Experimental: per-mode loss overrides for the three signal-band modes.
    // The baseline model uses a single alpha for signal and both idlers.
    std::optional<double> alpha_signal_override;
    std::optional<double> alpha_idler_plus_override;
    std::optional<double> alpha_idler_minus_override;

    double alpha_s() const { return alpha_signal_override.value_or(signal.alpha); }
    double alpha_ip() const { return alpha_idler_plus_override.value_or(signal.alpha); }
    double alpha_im() const { return alpha_idler_minus_override.value_or(signal.alpha); }
};

namespace detail {

inline void validate_band(const BandParams& b, const std::string& band) {
    const std::string where = "RingParams[" + band + "]: ";
    if (!(b.omega_hat > 0.0)) throw ValidationError(where + "reference frequency must be positive");
    if (!(b.q_loaded > 0.0)) throw ValidationError(where + "loaded quality Q_L must be positive");
    if (!(b.q_intrinsic > 0.0)) throw ValidationError(where + "intrinsic quality Q_i must be positive");
    if (!(b.q_coupling > 0.0)) throw ValidationError(where + "coupling quality Q_c must be positive");
    const double lhs = 1.0 / b.q_loaded;
    const double rhs = 1.0 / b.q_intrinsic + 1.0 / b.q_coupling;
    if (std::abs(lhs - rhs) > 1e-12 * lhs)
        throw ValidationError(where + "1/Q_L = 1/Q_i + 1/Q_c violated beyond 1e-12 relative");
    if (!(b.alpha > 0.0)) throw ValidationError(where + "round-trip loss alpha must be positive");
    if (!(b.theta > 0.0)) throw ValidationError(where + "power coupling theta must be positive");
    if (b.theta > 2.0 * b.alpha * (1.0 + 1e-12))
        throw ValidationError(where + "theta <= 2 alpha violated (coupling exceeds total loss)");
}

} // namespace detail

inline void validate(const RingParams& r) {
    if (!(r.round_trip_time > 0.0)) throw ValidationError("RingParams: round-trip time t_R must be positive");
    if (!(r.circumference > 0.0)) throw ValidationError("RingParams: circumference L must be positive");
    if (!(r.radius > 0.0)) throw ValidationError("RingParams: radius R must be positive");
    if (std::abs(r.circumference - kTwoPi * r.radius) > 1e-9 * r.circumference)
        throw ValidationError("RingParams: L = 2 pi R violated");
    detail::validate_band(r.signal, "signal");
    detail::validate_band(r.pump, "pump");
    if (!(r.gamma_signal > 0.0)) throw ValidationError("RingParams: gamma_signal must be positive");
    if (!(r.gamma_pump > 0.0)) throw ValidationError("RingParams: gamma_pump must be positive");
    // Per-mode overrides must still leave a physical intrinsic loss.
    for (double a : {r.alpha_s(), r.alpha_ip(), r.alpha_im()}) {
        if (!(a > 0.0)) throw ValidationError("RingParams: per-mode alpha override must be positive");
        if (a < r.signal.theta / 2.0 - 1e-15)
            throw ValidationError("RingParams: per-mode alpha below theta/2 implies negative intrinsic loss");
    }
}

// Build one band from its loaded linewidth (FWHM, Hz) and intrinsic Q.
inline BandParams band_from_linewidth(double omega_hat, double t_r,
                                      double loaded_fwhm_hz, double q_intrinsic) {
    if (!(loaded_fwhm_hz > 0.0)) throw ValidationError("BandParams: loaded linewidth must be positive");
    BandParams b;
    b.omega_hat = omega_hat;
    b.q_loaded = omega_hat / (kTwoPi * loaded_fwhm_hz);
    b.q_intrinsic = q_intrinsic;
    const double inv_qc = 1.0 / b.q_loaded - 1.0 / q_intrinsic;
    if (!(inv_qc > 0.0))
        throw ValidationError("BandParams: loaded linewidth narrower than intrinsic (Q_L > Q_i)");
    b.q_coupling = 1.0 / inv_qc;
    b.alpha = omega_hat * t_r / (2.0 * b.q_loaded);
    b.theta = omega_hat * t_r / b.q_coupling;
    return b;
}

// Build one band from intrinsic and coupling Q.
inline BandParams band_from_qs(double omega_hat, double t_r,
                               double q_intrinsic, double q_coupling) {
    BandParams b;
    b.omega_hat = omega_hat;
    b.q_intrinsic = q_intrinsic;
    b.q_coupling = q_coupling;
    b.q_loaded = 1.0 / (1.0 / q_intrinsic + 1.0 / q_coupling);
    b.alpha = omega_hat * t_r / (2.0 * b.q_loaded);
    b.theta = omega_hat * t_r / b.q_coupling;
    return b;
}

// Fraction of intracavity loss that exits to the access waveguide,
// kappa_c / (kappa_c + kappa_i) = Q_L / Q_c.
inline double extraction_fraction(const BandParams& b) {
    return b.q_loaded / b.q_coupling;
}

} // namespace ringfc

#endif // RINGFC_RING_HPP
