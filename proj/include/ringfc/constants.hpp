#ifndef RINGFC_CONSTANTS_HPP
#define RINGFC_CONSTANTS_HPP

namespace ringfc {

// CODATA 2018 exact values.
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kPlanck = 6.62607015e-34;           // J s
inline constexpr double kPi = 3.141592653589793238462643;
inline constexpr double kTwoPi = 2.0 * kPi;

// Energy of one photon at vacuum wavelength lambda (J).
inline double photon_energy(double lambda_m) {
    return kPlanck * kSpeedOfLight / lambda_m;
}

// Conversions between vacuum wavelength and (ordinary) frequency.
inline double wavelength_to_frequency(double lambda_m) { return kSpeedOfLight / lambda_m; }
inline double frequency_to_wavelength(double f_hz) { return kSpeedOfLight / f_hz; }

} // namespace ringfc

#endif // RINGFC_CONSTANTS_HPP
