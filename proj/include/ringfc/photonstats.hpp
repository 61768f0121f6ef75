#ifndef RINGFC_PHOTONSTATS_HPP
#define RINGFC_PHOTONSTATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ringfc/constants.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/fitting.hpp"
#include "ringfc/spectral.hpp"
#include "ringfc/voigt.hpp"

namespace ringfc {

// --- second-order correlation model ----------------------------------------

// g2(tau) = 1 + A1 exp(-g1 |tau|) + A2 exp(-g2 |tau|), with A1 + A2 = -1.
// The constrained form describes antibunching at tau = 0, possible bunching
// at intermediate delay, and a Poissonian plateau at large delay.
struct G2Model {
    double a1 = -1.0;
    double a2 = 0.0;       // always -1 - a1
    double gamma1 = 0.0;   // 1/s
    double gamma2 = 0.0;   // 1/s

    static G2Model make(double a1, double gamma1, double gamma2) {
        G2Model m;
        m.a1 = a1;
        m.a2 = -1.0 - a1;
        m.gamma1 = gamma1;
        m.gamma2 = gamma2;
        if (!(gamma1 > 0.0 && gamma2 > 0.0))
            throw ValidationError("G2Model: decay rates must be positive");
        // Nonnegativity over the fitted domain.
        const double horizon = 10.0 / std::min(gamma1, gamma2);
        for (int i = 0; i <= 400; ++i) {
            const double tau = horizon * static_cast<double>(i) / 400.0;
            if (m.value(tau) < -1e-9)
                throw ValidationError("G2Model: g2(tau) negative on the fitted domain");
        }
        return m;
    }

    double value(double tau) const {
        const double at = std::abs(tau);
        return 1.0 + a1 * std::exp(-gamma1 * at) + a2 * std::exp(-gamma2 * at);
    }
};

inline double g2_eval(const G2Model& m, double tau) { return m.value(tau); }

// --- coincidence histograms --------------------------------------------------

struct CoincidenceHistogram {
    std::vector<double> tau_s;       // uniform bin centers
    std::vector<double> counts;      // non-negative

    double bin_width() const {
        return tau_s.size() > 1 ? tau_s[1] - tau_s[0] : 0.0;
    }
};

inline void validate(const CoincidenceHistogram& h) {
    if (h.tau_s.size() != h.counts.size() || h.tau_s.size() < 2)
        throw ValidationError("CoincidenceHistogram: need matching tau/count arrays");
    const double w = h.bin_width();
    if (!(w > 0.0)) throw ValidationError("CoincidenceHistogram: bin width must be positive");
    for (std::size_t i = 1; i < h.tau_s.size(); ++i)
        if (std::abs((h.tau_s[i] - h.tau_s[i - 1]) - w) > 1e-6 * w)
            throw ValidationError("CoincidenceHistogram: bins must be uniformly spaced");
    for (double c : h.counts)
        if (c < 0.0) throw ValidationError("CoincidenceHistogram: counts must be non-negative");
}

struct G2FitReport {
    G2Model model;
    double g2_zero_datum = 0.0;     // normalized zero-delay bin (not the fit value)
    double g2_zero_sigma = 0.0;     // propagated from plateau fluctuations
    double plateau_level = 0.0;     // raw counts
    double plateau_sigma = 0.0;
    bool poissonian_warning = false; // A1 ~ 0: constrained model degenerate
    double chi2 = 0.0;
};

// Constrained fit of the double-exponential model to a normalized histogram.
// The reported g2(0) is the zero-delay datum, not the fit value; its
// uncertainty comes from the count fluctuations on the Poissonian plateau.
inline G2FitReport fit_g2(const CoincidenceHistogram& hist, const FitOptions& options = {}) {
    validate(hist);
    const std::size_t n = hist.tau_s.size();
    if (n < 50) throw ArgumentError("fit_g2: need at least 50 bins");

    // Plateau estimate from the outer 25 % of bins on each side.
    std::vector<double> plateau;
    const std::size_t edge = std::max<std::size_t>(1, n / 8);
    for (std::size_t i = 0; i < edge; ++i) plateau.push_back(hist.counts[i]);
    for (std::size_t i = n - edge; i < n; ++i) plateau.push_back(hist.counts[i]);
    const double p_mean = std::accumulate(plateau.begin(), plateau.end(), 0.0) /
                          static_cast<double>(plateau.size());
    if (!(p_mean > 0.0)) throw ArgumentError("fit_g2: empty plateau, cannot normalize");
    double p_var = 0.0;
    for (double v : plateau) p_var += (v - p_mean) * (v - p_mean);
    p_var /= static_cast<double>(plateau.size() > 1 ? plateau.size() - 1 : 1);
    const double p_sigma = std::sqrt(p_var);

    std::vector<double> g2(n);
    for (std::size_t i = 0; i < n; ++i) g2[i] = hist.counts[i] / p_mean;

    // Zero-delay bin: nearest to tau = 0.
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(hist.tau_s[i]) < std::abs(hist.tau_s[i0])) i0 = i;

    // Initial rates from the span where the dip recovers.
    const double span = std::abs(hist.tau_s.back());
    double tau_half = span / 10.0;
    const double mid = 0.5 * (g2[i0] + 1.0);
    for (std::size_t i = i0; i < n; ++i) {
        if (g2[i] >= mid) {
            tau_half = std::max(std::abs(hist.tau_s[i] - hist.tau_s[i0]), hist.bin_width());
            break;
        }
    }
    const double g1_init = std::log(2.0) / tau_half;

    // Parameters: A1, log gamma1, log gamma2, plateau scale.
    auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
        const double a1 = p[0];
        const double gamma1 = std::exp(p[1]);
        const double gamma2 = std::exp(p[2]);
        const double scale = p[3];
        for (std::size_t i = 0; i < n; ++i) {
            const double at = std::abs(hist.tau_s[i]);
            const double model = scale * (1.0 + a1 * std::exp(-gamma1 * at) -
                                          (1.0 + a1) * std::exp(-gamma2 * at));
            r[i] = model - g2[i];
        }
    };
    const std::vector<double> p0{g2[i0] - 1.0, std::log(g1_init), std::log(g1_init / 8.0), 1.0};
    const std::vector<std::pair<double, double>> bounds{
        {-8.0, 0.0}, {std::log(g1_init) - 8.0, std::log(g1_init) + 8.0},
        {std::log(g1_init) - 10.0, std::log(g1_init) + 8.0}, {0.5, 2.0}};
    FitResult fr = lm_fit(residual, p0, bounds, n, options);
    if (!fr.converged)
        throw FitError("fit_g2: did not converge after bounded restarts", fr.chi2);

    G2FitReport rep;
    // An antibunching amplitude this small is indistinguishable from a flat
    // (Poissonian) histogram; the constrained model is degenerate there.
    rep.poissonian_warning = fr.params[0] > -0.02;
    const double a1 = std::min(fr.params[0], -1e-6);
    rep.model = G2Model{};
    rep.model.a1 = a1;
    rep.model.a2 = -1.0 - a1;
    rep.model.gamma1 = std::exp(fr.params[1]);
    rep.model.gamma2 = std::exp(fr.params[2]);
    rep.chi2 = fr.chi2;
    rep.plateau_level = p_mean * fr.params[3];
    rep.plateau_sigma = p_sigma;
    rep.g2_zero_datum = hist.counts[i0] / rep.plateau_level;
    // Count fluctuation on the Poissonian plateau, expressed in normalized
    // units; the plateau-mean error itself enters as a 1/sqrt(M) correction.
    const double m_eff = static_cast<double>(plateau.size());
    rep.g2_zero_sigma = (p_sigma / rep.plateau_level) * std::sqrt(1.0 + 1.0 / m_eff);
    return rep;
}

// Pulsed-excitation utility: g2(0) as the ratio of coincidences in the
// zero-delay window to the mean of the side-peak windows at multiples of the
// repetition period.
inline double pulsed_g2_peak_ratio(const CoincidenceHistogram& hist, double window_s,
                                   double period_s, int n_side_peaks = 4) {
    validate(hist);
    if (!(window_s > 0.0 && period_s > window_s))
        throw ArgumentError("pulsed_g2_peak_ratio: need 0 < window < period");
    auto area_around = [&](double center) {
        double acc = 0.0;
        for (std::size_t i = 0; i < hist.tau_s.size(); ++i)
            if (std::abs(hist.tau_s[i] - center) <= 0.5 * window_s) acc += hist.counts[i];
        return acc;
    };
    const double zero = area_around(0.0);
    double side = 0.0;
    int used = 0;
    for (int k = 1; k <= n_side_peaks; ++k) {
        for (double s : {-1.0, 1.0}) {
            const double center = s * static_cast<double>(k) * period_s;
            if (center > hist.tau_s.front() && center < hist.tau_s.back()) {
                side += area_around(center);
                ++used;
            }
        }
    }
    if (used == 0) throw ArgumentError("pulsed_g2_peak_ratio: no side peaks inside histogram span");
    return zero / (side / static_cast<double>(used));
}

// --- noise mixing -------------------------------------------------------------

// Measured zero-delay correlation after mixing a source with a time-invariant
// Poissonian background; rho is the source share of the detected flux:
//   g2_meas(0) = 1 + rho^2 (g2_src(0) - 1).
inline double mix_with_noise(double g2_source_zero, double signal_fraction) {
    if (!(signal_fraction >= 0.0 && signal_fraction <= 1.0))
        throw ArgumentError("mix_with_noise: signal fraction must lie in [0, 1]");
    if (g2_source_zero < 0.0)
        throw ArgumentError("mix_with_noise: g2(0) must be non-negative");
    return 1.0 + signal_fraction * signal_fraction * (g2_source_zero - 1.0);
}

// Inverse of mix_with_noise: the signal fraction explaining a measured
// degradation. Infeasible when the measured value lies outside the reachable
// interval between g2_src(0) and 1.
inline double solve_signal_fraction(double g2_source_zero, double g2_measured_zero) {
    if (g2_source_zero < 0.0 || g2_measured_zero < 0.0)
        throw ArgumentError("solve_signal_fraction: g2 values must be non-negative");
    const double lo = std::min(g2_source_zero, 1.0);
    const double hi = std::max(g2_source_zero, 1.0);
    if (g2_measured_zero < lo - 1e-12 || g2_measured_zero > hi + 1e-12)
        throw ArgumentError("solve_signal_fraction: measured g2(0) outside the feasible mix range");
    if (std::abs(g2_source_zero - 1.0) < 1e-15) return 1.0; // any fraction; report unity
    const double rho2 = (g2_measured_zero - 1.0) / (g2_source_zero - 1.0);
    return std::sqrt(std::clamp(rho2, 0.0, 1.0));
}

// --- converter noise budget ---------------------------------------------------

struct NoiseBudget {
    double noise_power_w = 0.0;
    double wavelength_m = 0.0;
    double noise_flux = 0.0;             // photons / s
    double repetition_rate_hz = 0.0;
    double time_bin_s = 0.0;
    double noise_photons_per_pulse = 0.0;
    double signal_photons_per_pulse = 0.0;
    double conversion_efficiency = 0.0;
    double snr = 0.0;
};

inline NoiseBudget noise_budget(double noise_power_w, double wavelength_m,
                                double repetition_rate_hz, double time_bin_s,
                                double signal_photons_per_pulse, double efficiency) {
    if (!(wavelength_m > 0.0)) throw ArgumentError("noise_budget: wavelength must be positive");
    if (!(noise_power_w > 0.0 && repetition_rate_hz > 0.0 && time_bin_s > 0.0 &&
          signal_photons_per_pulse > 0.0 && efficiency > 0.0))
        throw ArgumentError("noise_budget: all inputs must be positive");
    NoiseBudget b;
    b.noise_power_w = noise_power_w;
    b.wavelength_m = wavelength_m;
    b.repetition_rate_hz = repetition_rate_hz;
    b.time_bin_s = time_bin_s;
    b.signal_photons_per_pulse = signal_photons_per_pulse;
    b.conversion_efficiency = efficiency;
    b.noise_flux = noise_power_w / photon_energy(wavelength_m);
    b.noise_photons_per_pulse = b.noise_flux * time_bin_s;
    b.snr = signal_photons_per_pulse * efficiency / b.noise_photons_per_pulse;
    return b;
}

// --- spectral line fitting ------------------------------------------------------

enum class LineModel { Lorentzian, Voigt };

struct LinewidthFit {
    LineModel model = LineModel::Lorentzian;
    double fwhm_hz = 0.0;
    double fwhm_sigma_hz = 0.0;
    double center_hz = 0.0;
    double amplitude = 0.0;          // peak density
    double fwhm_lorentz_hz = 0.0;    // Voigt decomposition
    double fwhm_gauss_hz = 0.0;
    double chi2 = 0.0;
};

// Nonlinear least-squares peak fit; FWHM uncertainty from the fit covariance.
inline LinewidthFit fit_linewidth(const Spectrum& spectrum, LineModel model,
                                  const FitOptions& options = {}) {
    validate(spectrum);
    const std::size_t n = spectrum.frequency_hz.size();
    std::size_t ipk = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (spectrum.density[i] > spectrum.density[ipk]) ipk = i;
    const double peak = spectrum.density[ipk];
    if (!(peak > 0.0)) throw ArgumentError("fit_linewidth: spectrum has no peak");
    std::size_t above = 0;
    for (double d : spectrum.density)
        if (d > 0.5 * peak) ++above;
    if (above < 3)
        throw ArgumentError("fit_linewidth: under-resolved peak (fewer than 3 points above half maximum)");

    const double f0_init = spectrum.frequency_hz[ipk];
    double width_init = spectrum_fwhm(spectrum);
    if (!(width_init > 0.0)) width_init = (spectrum.frequency_hz.back() - spectrum.frequency_hz.front()) / 4.0;
    const double f_scale = width_init;

    LinewidthFit out;
    out.model = model;
    if (model == LineModel::Lorentzian) {
        // p = (amplitude, center offset / scale, fwhm / scale)
        auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
            const double amp = p[0], f0 = f0_init + p[1] * f_scale, g = 0.5 * p[2] * f_scale;
            for (std::size_t i = 0; i < n; ++i) {
                const double df = spectrum.frequency_hz[i] - f0;
                r[i] = amp * g * g / (df * df + g * g) - spectrum.density[i];
            }
        };
        const std::vector<double> p0{peak, 0.0, 1.0};
        const std::vector<std::pair<double, double>> bounds{
            {0.0, 1e6 * peak}, {-100.0, 100.0}, {1e-6, 1e6}};
        FitResult fr = lm_fit(residual, p0, bounds, n, options);
        if (!fr.converged) throw FitError("fit_linewidth: Lorentzian fit did not converge", fr.chi2);
        out.amplitude = fr.params[0];
        out.center_hz = f0_init + fr.params[1] * f_scale;
        out.fwhm_hz = fr.params[2] * f_scale;
        out.fwhm_lorentz_hz = out.fwhm_hz;
        out.fwhm_sigma_hz = fr.sigma[2] * f_scale;
        out.chi2 = fr.chi2;
        return out;
    }

    // Voigt: p = (amplitude, center offset / scale, fwhm_L / scale, fwhm_G / scale)
    auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
        const double amp = p[0], f0 = f0_init + p[1] * f_scale;
        const double fl = p[2] * f_scale, fg = p[3] * f_scale;
        const double v0 = voigt_density(0.0, fl, fg);
        for (std::size_t i = 0; i < n; ++i) {
            const double df = spectrum.frequency_hz[i] - f0;
            r[i] = amp * voigt_density(df, fl, fg) / v0 - spectrum.density[i];
        }
    };
    const std::vector<double> p0{peak, 0.0, 0.6, 0.6};
    const std::vector<std::pair<double, double>> bounds{
        {0.0, 1e6 * peak}, {-100.0, 100.0}, {1e-6, 1e6}, {1e-6, 1e6}};
    FitResult fr = lm_fit(residual, p0, bounds, n, options);
    if (!fr.converged) throw FitError("fit_linewidth: Voigt fit did not converge", fr.chi2);
    out.amplitude = fr.params[0];
    out.center_hz = f0_init + fr.params[1] * f_scale;
    out.fwhm_lorentz_hz = fr.params[2] * f_scale;
    out.fwhm_gauss_hz = fr.params[3] * f_scale;
    out.fwhm_hz = voigt_fwhm(out.fwhm_lorentz_hz, out.fwhm_gauss_hz);
    // Width uncertainty through the width-combination formula.
    const double fl = out.fwhm_lorentz_hz, fg = out.fwhm_gauss_hz;
    const double root = std::sqrt(0.2166 * fl * fl + fg * fg);
    const double dfl = 0.5346 + (root > 0.0 ? 0.2166 * fl / root : 0.0);
    const double dfg = root > 0.0 ? fg / root : 1.0;
    const double sl = fr.sigma[2] * f_scale, sg = fr.sigma[3] * f_scale;
    out.fwhm_sigma_hz = std::sqrt(dfl * dfl * sl * sl + dfg * dfg * sg * sg);
    out.chi2 = fr.chi2;
    return out;
}

// --- data ingestion ---------------------------------------------------------------

namespace detail {

// Two-column CSV with an optional header naming the expected columns.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    std::istream& in, const std::string& header_prefix, const std::string& what) {
    std::vector<double> a, b;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind(header_prefix, 0) == 0) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ArgumentError(what + ": parse error at line " + std::to_string(line_no));
        try {
            a.push_back(std::stod(line.substr(0, comma)));
            b.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ArgumentError(what + ": parse error at line " + std::to_string(line_no));
        }
    }
    return {std::move(a), std::move(b)};
}

} // namespace detail

// CSV `tau_s,counts`.
inline CoincidenceHistogram read_histogram_csv(std::istream& in) {
    auto [tau, counts] = detail::read_two_column_csv(in, "tau_s", "histogram CSV");
    CoincidenceHistogram h;
    h.tau_s = std::move(tau);
    h.counts = std::move(counts);
    validate(h);
    return h;
}

// CSV `delay_s,visibility`.
struct VisibilityData {
    std::vector<double> delay_s;
    std::vector<double> visibility;
};

inline VisibilityData read_visibility_csv(std::istream& in) {
    auto [delay, vis] = detail::read_two_column_csv(in, "delay_s", "visibility CSV");
    return VisibilityData{std::move(delay), std::move(vis)};
}

// --- coherence-time fitting -------------------------------------------------------

struct CoherenceFit {
    double tau_c_s = 0.0;
    double tau_c_sigma_s = 0.0;
    double equivalent_fwhm_hz = 0.0;   // 1 / (pi tau_c), Lorentzian equivalent
    double chi2 = 0.0;
};

// Single-sided exponential visibility decay V(tau) = exp(-tau / tau_c).
inline CoherenceFit fit_coherence(const std::vector<double>& delay_s,
                                  const std::vector<double>& visibility,
                                  const FitOptions& options = {}) {
    if (delay_s.size() != visibility.size() || delay_s.size() < 5)
        throw ArgumentError("fit_coherence: need at least 5 delay points");
    // Non-decaying data cannot be fit by a decaying exponential.
    double first = visibility.front(), last = visibility.back();
    if (!(last < first))
        throw FitError("fit_coherence: visibility does not decay with delay", 0.0);

    double tau_init = delay_s.back();
    for (std::size_t i = 0; i < delay_s.size(); ++i) {
        if (visibility[i] <= std::exp(-1.0)) {
            tau_init = std::max(delay_s[i], 1e-15);
            break;
        }
    }
    auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
        const double tau = p[0] * tau_init;
        for (std::size_t i = 0; i < delay_s.size(); ++i)
            r[i] = std::exp(-delay_s[i] / tau) - visibility[i];
    };
    const std::vector<double> p0{1.0};
    const std::vector<std::pair<double, double>> bounds{{1e-6, 1e6}};
    FitResult fr = lm_fit(residual, p0, bounds, delay_s.size(), options);
    if (!fr.converged) throw FitError("fit_coherence: fit did not converge", fr.chi2);
    CoherenceFit out;
    out.tau_c_s = fr.params[0] * tau_init;
    out.tau_c_sigma_s = fr.sigma[0] * tau_init;
    out.equivalent_fwhm_hz = 1.0 / (kPi * out.tau_c_s);
    out.chi2 = fr.chi2;
    return out;
}

} // namespace ringfc

#endif // RINGFC_PHOTONSTATS_HPP
