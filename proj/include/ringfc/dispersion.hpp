#ifndef RINGFC_DISPERSION_HPP
#define RINGFC_DISPERSION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>

#include "ringfc/constants.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/ring.hpp"

namespace ringfc {

enum class Band { Signal, Pump };

inline const char* band_name(Band b) { return b == Band::Signal ? "signal" : "pump"; }

// Resonance-frequency grid of one band:
//   w_hat(m) = w0 + D1 (m - m0) + D2/2 (m - m0)^2 + D3/6 (m - m0)^3 + offset(m)
// The per-mode offsets carry measured deviations from the polynomial model
// (mode-interaction shifts); they are zero by default.
struct BandDispersion {
    double omega0 = 0.0;       // rad/s at the reference mode
    std::int64_t m0 = 0;       // reference azimuthal mode number
    double d1 = 0.0;           // FSR, rad/s per mode
    double d2 = 0.0;           // rad/s per mode^2
    double d3 = 0.0;           // rad/s per mode^3
    std::int64_t window = 50;  // validity |m - m0| <= window
    std::map<std::int64_t, double> mode_offsets; // keyed by m - m0, rad/s
};

struct DispersionModel {
    BandDispersion signal;
    BandDispersion pump;
    double thermal_rate = 13.67e-12;      // m of wavelength per kelvin
};

struct ModeAssignment {
    std::int64_t m_s = 0;
    std::int64_t m_p1 = 0;
    std::int64_t m_p2 = 0;
    std::int64_t m_ip = 0;   // m_s + mu
    std::int64_t m_im = 0;   // m_s - mu
    std::int64_t mu = 0;     // |m_p1 - m_p2|
};

inline const BandDispersion& band_of(const DispersionModel& d, Band b) {
    return b == Band::Signal ? d.signal : d.pump;
}

inline void validate(const DispersionModel& d) {
    for (Band b : {Band::Signal, Band::Pump}) {
        const BandDispersion& bd = band_of(d, b);
        const std::string where = std::string("DispersionModel[") + band_name(b) + "]: ";
        if (!(bd.omega0 > 0.0)) throw ValidationError(where + "reference frequency must be positive");
        if (!(bd.d1 > 0.0)) throw ValidationError(where + "FSR D1 must be positive");
        if (bd.window < 1) throw ValidationError(where + "validity window must be at least 1");
        // Resonance ordering over the declared window: w_hat(m+1) > w_hat(m).
        const double curStep = bd.d1 - (std::abs(bd.d2) + std::abs(bd.d3) * bd.window / 2.0) * bd.window;
        if (!(curStep > 0.0))
            throw ValidationError(where + "resonances not monotonically ordered over validity window");
    }
    if (!(d.thermal_rate > 0.0)) throw ValidationError("DispersionModel: thermal tuning rate must be positive");
}

// Resonance angular frequency of azimuthal mode m.
inline double mode_frequency(const DispersionModel& disp, Band band, std::int64_t m) {
    const BandDispersion& bd = band_of(disp, band);
    const std::int64_t dm = m - bd.m0;
    if (std::abs(dm) > bd.window)
        throw RangeError(std::string("mode_frequency: mode ") + std::to_string(m) +
                             " outside " + band_name(band) + "-band validity window |m - m0| <= " +
                             std::to_string(bd.window),
                         static_cast<double>(bd.m0 + (dm > 0 ? bd.window : -bd.window)));
    const double x = static_cast<double>(dm);
    double w = bd.omega0 + bd.d1 * x + 0.5 * bd.d2 * x * x + bd.d3 * x * x * x / 6.0;
    auto it = bd.mode_offsets.find(dm);
    if (it != bd.mode_offsets.end()) w += it->second;
    return w;
}

// Resonance-frequency difference w_hat(m) - w_hat(m_ref), evaluated from the
// polynomial terms directly so adjacent-mode gaps keep full precision.
inline double mode_frequency_offset(const DispersionModel& disp, Band band,
                                    std::int64_t m, std::int64_t m_ref) {
    const BandDispersion& bd = band_of(disp, band);
    for (std::int64_t mm : {m, m_ref})
        if (std::abs(mm - bd.m0) > bd.window)
            throw RangeError(std::string("mode_frequency_offset: mode ") + std::to_string(mm) +
                             " outside " + band_name(band) + "-band validity window");
    const double x = static_cast<double>(m - bd.m0);
    const double r = static_cast<double>(m_ref - bd.m0);
    double w = bd.d1 * (x - r) + 0.5 * bd.d2 * (x * x - r * r) +
               bd.d3 * (x * x * x - r * r * r) / 6.0;
    auto it = bd.mode_offsets.find(m - bd.m0);
    if (it != bd.mode_offsets.end()) w += it->second;
    it = bd.mode_offsets.find(m_ref - bd.m0);
    if (it != bd.mode_offsets.end()) w -= it->second;
    return w;
}

// Nearest mode to angular frequency omega. Throws RangeError when the nearest
// in-window mode is farther than half the local FSR, carrying the residual
// detuning (rad/s) as context.
inline std::int64_t nearest_mode(const DispersionModel& disp, Band band, double omega) {
    const BandDispersion& bd = band_of(disp, band);
    std::int64_t guess = bd.m0 + static_cast<std::int64_t>(std::llround((omega - bd.omega0) / bd.d1));
    if (guess > bd.m0 + bd.window) guess = bd.m0 + bd.window;
    if (guess < bd.m0 - bd.window) guess = bd.m0 - bd.window;
    std::int64_t best = guess;
    double best_err = std::abs(mode_frequency(disp, band, guess) - omega);
    for (std::int64_t m = guess - 3; m <= guess + 3; ++m) {
        if (std::abs(m - bd.m0) > bd.window) continue;
        const double err = std::abs(mode_frequency(disp, band, m) - omega);
        if (err < best_err) { best = m; best_err = err; }
    }
    const double local_fsr = bd.d1 + bd.d2 * static_cast<double>(best - bd.m0);
    if (best_err >= 0.5 * local_fsr * (1.0 - 1e-12))
        throw RangeError(std::string("nearest_mode: no ") + band_name(band) +
                             "-band mode within half an FSR (residual " +
                             std::to_string(best_err / kTwoPi) + " Hz)",
                         best_err);
    return best;
}

// Assign signal and pump frequencies to cavity modes and derive the idler
// modes from the matching rule m_i(+/-) = m_s +/- |m_p1 - m_p2|.
inline ModeAssignment assign_modes(const DispersionModel& disp,
                                   double omega_s, double omega_p1, double omega_p2) {
    ModeAssignment a;
    a.m_s = nearest_mode(disp, Band::Signal, omega_s);
    a.m_p1 = nearest_mode(disp, Band::Pump, omega_p1);
    a.m_p2 = nearest_mode(disp, Band::Pump, omega_p2);
    a.mu = std::llabs(a.m_p1 - a.m_p2);
    a.m_ip = a.m_s + a.mu;
    a.m_im = a.m_s - a.mu;
    return a;
}

// Dimensionless detunings of the three signal-band modes for a given drive:
//   delta_k = (w_hat(m_k) - w_k) t_R,  w_i(+/-) = w_s +/- |w_p1 - w_p2|.
struct SignalBandDetunings {
    double delta_s = 0.0;
    double delta_ip = 0.0;
    double delta_im = 0.0;
    // Frequency-matching parameters derived from the definitions.
    double omega1() const { return 0.5 * (delta_ip - delta_im); }
    double omega2() const { return 0.5 * (delta_ip + delta_im - 2.0 * delta_s); }
};

inline SignalBandDetunings detunings(const DispersionModel& disp, const ModeAssignment& a,
                                     double omega_s, double omega_p1, double omega_p2,
                                     const RingParams& ring) {
    const double t_r = ring.round_trip_time;
    const double pump_gap = std::abs(omega_p1 - omega_p2);
    SignalBandDetunings d;
    d.delta_s = (mode_frequency(disp, Band::Signal, a.m_s) - omega_s) * t_r;
    // Idler detunings relative to the signal mode, so the mode-to-mode gaps
    // do not lose precision against the absolute optical frequency.
    const double rel_ip = mode_frequency_offset(disp, Band::Signal, a.m_ip, a.m_s);
    const double rel_im = mode_frequency_offset(disp, Band::Signal, a.m_im, a.m_s);
    d.delta_ip = d.delta_s + (rel_ip - pump_gap) * t_r;
    d.delta_im = d.delta_s + (rel_im + pump_gap) * t_r;
    return d;
}

// --- thermal tuning ------------------------------------------------------

// Linear thermo-optic model: both bands' combs shift rigidly in wavelength at
// the tuning rate; pumps are retuned alongside with their separation fixed.
struct ThermalTuner {
    double reference_temperature_c = 22.0;
    double rate_m_per_k = 13.67e-12;
    double min_temperature_c = 5.0;
    double max_temperature_c = 95.0;
};

struct TuneState {
    double temperature_c = 0.0;
    double shift_m = 0.0;      // resonance wavelength shift at this temperature
};

struct TuneResult {
    double temperature_c = 0.0;       // required (possibly clamped) temperature
    double residual_wavelength_m = 0.0; // unreachable remainder, 0 when in range
    bool pumps_retuned = true;        // pump combs follow, separation kept fixed
};

inline TuneState thermal_shift(const ThermalTuner& t, double temperature_c) {
    if (!(t.rate_m_per_k > 0.0)) throw ValidationError("ThermalTuner: tuning rate must be positive");
    return TuneState{temperature_c, t.rate_m_per_k * (temperature_c - t.reference_temperature_c)};
}

// Temperature that moves a resonance at lambda_current onto lambda_target.
// Throws RangeError with the clamped best temperature when out of range.
inline TuneResult thermal_tune(const ThermalTuner& t, double lambda_target_m, double lambda_current_m) {
    if (!(t.rate_m_per_k > 0.0)) throw ValidationError("ThermalTuner: tuning rate must be positive");
    const double needed = lambda_target_m - lambda_current_m;
    const double temperature = t.reference_temperature_c + needed / t.rate_m_per_k;
    TuneResult r;
    if (temperature < t.min_temperature_c || temperature > t.max_temperature_c) {
        const double clamped = std::clamp(temperature, t.min_temperature_c, t.max_temperature_c);
        r.temperature_c = clamped;
        r.residual_wavelength_m = needed - t.rate_m_per_k * (clamped - t.reference_temperature_c);
        throw RangeError("thermal_tune: required temperature " + std::to_string(temperature) +
                             " C outside configured range; best reachable " + std::to_string(clamped) + " C",
                         clamped);
    }
    r.temperature_c = temperature;
    r.residual_wavelength_m = 0.0;
    return r;
}

// --- spectral translation range ------------------------------------------

struct TranslationRange {
    double shift_hz = 0.0;
    double shift_m = 0.0;   // at the signal carrier wavelength
};

// Shift selected by a pump separation of mu FSRs: df = mu D1 / 2pi,
// expressed also as a wavelength span at the signal carrier.
inline TranslationRange translation_range(const DispersionModel& disp, std::int64_t mu,
                                          double signal_wavelength_m) {
    if (mu < 1) throw ArgumentError("translation_range: mu must be >= 1");
    TranslationRange t;
    t.shift_hz = static_cast<double>(mu) * disp.signal.d1 / kTwoPi;
    t.shift_m = signal_wavelength_m * signal_wavelength_m * t.shift_hz / kSpeedOfLight;
    return t;
}

} // namespace ringfc

#endif // RINGFC_DISPERSION_HPP
