#ifndef RINGFC_CMT_HPP
#define RINGFC_CMT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "ringfc/constants.hpp"
#include "ringfc/dispersion.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/ring.hpp"

namespace ringfc {

using complexd = std::complex<double>;

// Two-pump drive. Intracavity fields are in sqrt(W); |E|^2 is the average
// power traveling inside the cavity.
struct PumpConfig {
    double power_1 = 0.0;         // W, on-chip
    double power_2 = 0.0;         // W, on-chip
    double omega_p1 = 0.0;        // rad/s
    double omega_p2 = 0.0;        // rad/s
    std::int64_t m_p1 = 0;
    std::int64_t m_p2 = 0;
    complexd field_1{0.0, 0.0};   // intracavity pump field E_p1
    complexd field_2{0.0, 0.0};   // intracavity pump field E_p2

    std::int64_t mu() const { return std::llabs(m_p1 - m_p2); }
    double pump_gap() const { return std::abs(omega_p1 - omega_p2); }
};

inline void validate(const PumpConfig& p) {
    if (p.power_1 < 0.0 || p.power_2 < 0.0)
        throw ValidationError("PumpConfig: pump powers must be non-negative");
    if (p.mu() < 1) throw ValidationError("PumpConfig: mode separation mu must be >= 1");
    if (!(p.pump_gap() > 0.0)) throw ValidationError("PumpConfig: pump frequencies must differ");
}

// Dimensionless parameters of the three-mode model. delta convention:
// delta = (w_hat - w) t_R, positive when the drive is red of resonance.
// The idler detunings are derived, so the defining identities
// Omega1 = (d+ - d-)/2 and Omega2 = (d+ + d- - 2 ds)/2 hold by construction.
struct CouplingSet {
    double omega0 = 0.0;   // conversion coupling, >= 0
    double delta_s = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;

    double delta_ip() const { return delta_s + omega1 + omega2; }
    double delta_im() const { return delta_s - omega1 + omega2; }

    static CouplingSet from_detunings(double omega0, double delta_s,
                                      double delta_ip, double delta_im) {
        CouplingSet c;
        c.omega0 = omega0;
        c.delta_s = delta_s;
        c.omega1 = 0.5 * (delta_ip - delta_im);
        c.omega2 = 0.5 * (delta_ip + delta_im - 2.0 * delta_s);
        return c;
    }
};

inline void validate(const CouplingSet& c) {
    if (c.omega0 < 0.0) throw ValidationError("CouplingSet: Omega0 must be non-negative");
}

// cw input signal.
struct SignalInput {
    double power = 0.0;     // W
    double omega_s = 0.0;   // rad/s

    double photon_flux() const {
        if (!(omega_s > 0.0)) throw ArgumentError("SignalInput: carrier frequency required for photon flux");
        return power * kTwoPi / (kPlanck * omega_s);
    }
    static SignalInput from_flux(double flux_per_s, double omega_s) {
        if (!(omega_s > 0.0)) throw ArgumentError("SignalInput: carrier frequency required for photon flux");
        return SignalInput{flux_per_s * kPlanck * omega_s / kTwoPi, omega_s};
    }
};

// Steady-state solution with waveguide outputs and power bookkeeping.
struct FieldSolution {
    complexd field_s{0.0, 0.0};
    complexd field_ip{0.0, 0.0};
    complexd field_im{0.0, 0.0};
    double p_out_ip = 0.0;        // W in the waveguide, blue idler
    double p_out_im = 0.0;        // W, red idler
    double p_remnant = 0.0;       // W, unconverted signal
    double p_dissipated = 0.0;    // W lost to intrinsic loss
    double eta_ip = 0.0;          // conversion efficiency, blue
    double eta_im = 0.0;          // conversion efficiency, red
    double transmission = 0.0;    // remnant / input
    double balance_defect = 0.0;  // |1 - (eta+ + eta- + T + dissipated frac)|
    double condition = 0.0;       // 1-norm condition estimate of the solve
};

// --- pump build-up --------------------------------------------------------

// Linear build-up of each pump into its (decoupled) cavity mode:
//   E_p = i sqrt(theta_p P_p) / (alpha_p + i delta_p).
inline PumpConfig pump_buildup(const RingParams& ring, PumpConfig pumps,
                               double delta_p1, double delta_p2) {
    if (!(ring.pump.alpha > 0.0))
        throw ConfigError("pump_buildup: pump-band alpha missing from ring parameters");
    if (!(ring.pump.theta > 0.0))
        throw ConfigError("pump_buildup: pump-band theta missing from ring parameters");
    if (pumps.power_1 < 0.0 || pumps.power_2 < 0.0)
        throw ArgumentError("pump_buildup: pump powers must be non-negative");
    const complexd i_unit{0.0, 1.0};
    pumps.field_1 = i_unit * std::sqrt(ring.pump.theta * pumps.power_1) /
                    complexd{ring.pump.alpha, delta_p1};
    pumps.field_2 = i_unit * std::sqrt(ring.pump.theta * pumps.power_2) /
                    complexd{ring.pump.alpha, delta_p2};
    return pumps;
}

// Conversion coupling Omega0 = 2 gamma_s L |E_p1 E_p2|.
inline double omega0(const RingParams& ring, const PumpConfig& pumps) {
    return 2.0 * ring.gamma_signal * ring.circumference *
           std::abs(pumps.field_1) * std::abs(pumps.field_2);
}

// Frequency-matching parameters from the expansion of the resonance grid:
//   Omega1 = (D1 mu - |w_p1 - w_p2|) t_R - (gamma_p L / 2)(|E_p1|^2 - |E_p2|^2)
//   Omega2 = D2 mu^2 t_R / 2
// Equal pump powers zero the cross-phase imbalance term.
inline std::pair<double, double> mismatch_terms(const DispersionModel& disp,
                                                const RingParams& ring,
                                                const PumpConfig& pumps) {
    if (pumps.mu() < 1) throw ArgumentError("mismatch_terms: mu must be >= 1");
    const double mu = static_cast<double>(pumps.mu());
    const double t_r = ring.round_trip_time;
    const double xpm = 0.5 * ring.gamma_pump * ring.circumference *
                       (std::norm(pumps.field_1) - std::norm(pumps.field_2));
    const double w1 = (disp.signal.d1 * mu - pumps.pump_gap()) * t_r - xpm;
    const double w2 = 0.5 * disp.signal.d2 * mu * mu * t_r;
    return {w1, w2};
}

// --- steady state ---------------------------------------------------------

namespace detail {

struct ModeRates {
    complexd d_s, d_ip, d_im; // alpha_k + i delta_k
};

inline ModeRates mode_rates(const RingParams& ring, const CouplingSet& c) {
    return ModeRates{
        complexd{ring.alpha_s(), c.delta_s},
        complexd{ring.alpha_ip(), c.delta_ip()},
        complexd{ring.alpha_im(), c.delta_im()},
    };
}

// Solve the 3x3 system for an arbitrary right-hand side, by eliminating the
// idler rows (they couple only to the signal). The idler back-action terms
// are summed as a pair first, so relabeling i+ <-> i- commutes with the
// floating-point evaluation exactly.
inline void solve_rhs(const ModeRates& m, double w0, const complexd& b_s,
                      const complexd& b_ip, const complexd& b_im,
                      complexd& e_s, complexd& e_ip, complexd& e_im) {
    const complexd i_unit{0.0, 1.0};
    const complexd back_action = w0 * w0 / m.d_ip + w0 * w0 / m.d_im;
    const complexd coupled = m.d_s + back_action;
    e_s = (b_s + i_unit * w0 * (b_ip / m.d_ip + b_im / m.d_im)) / coupled;
    e_ip = (b_ip + i_unit * w0 * e_s) / m.d_ip;
    e_im = (b_im + i_unit * w0 * e_s) / m.d_im;
}

// 1-norm condition estimate from the explicit inverse (3x3).
inline double condition_estimate(const ModeRates& m, double w0) {
    const double a1 = std::abs(m.d_s) + 2.0 * w0;            // column norms of A
    const double a2 = std::abs(m.d_ip) + w0;
    const double a3 = std::abs(m.d_im) + w0;
    const double norm_a = std::max({a1, a2, a3});
    double norm_inv = 0.0;
    for (int j = 0; j < 3; ++j) {
        complexd e_s, e_ip, e_im;
        solve_rhs(m, w0, j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, j == 2 ? 1.0 : 0.0,
                  e_s, e_ip, e_im);
        norm_inv = std::max(norm_inv, std::abs(e_s) + std::abs(e_ip) + std::abs(e_im));
    }
    return norm_a * norm_inv;
}

// Waveguide outputs and bookkeeping shared by all field solvers.
inline FieldSolution assemble_solution(const RingParams& ring, const SignalInput& sig,
                                       complexd e_s, complexd e_ip, complexd e_im,
                                       double condition) {
    const complexd i_unit{0.0, 1.0};
    const double theta = ring.signal.theta;
    FieldSolution out;
    out.field_s = e_s;
    out.field_ip = e_ip;
    out.field_im = e_im;
    out.condition = condition;
    out.p_out_ip = theta * std::norm(e_ip);
    out.p_out_im = theta * std::norm(e_im);
    const complexd remnant = std::sqrt(sig.power) + i_unit * std::sqrt(theta) * e_s;
    out.p_remnant = std::norm(remnant);
    out.p_dissipated = (2.0 * ring.alpha_s() - theta) * std::norm(e_s) +
                       (2.0 * ring.alpha_ip() - theta) * std::norm(e_ip) +
                       (2.0 * ring.alpha_im() - theta) * std::norm(e_im);
    if (sig.power > 0.0) {
        out.eta_ip = out.p_out_ip / sig.power;
        out.eta_im = out.p_out_im / sig.power;
        out.transmission = out.p_remnant / sig.power;
        out.balance_defect = std::abs(
            1.0 - (out.eta_ip + out.eta_im + out.transmission + out.p_dissipated / sig.power));
    } else {
        out.transmission = 1.0;  // no light in, none lost
        out.balance_defect = 0.0;
    }
    return out;
}

} // namespace detail

inline constexpr double kConditionLimit = 1e12;

// Steady state of the three-mode model
//   0 = -(a_s + i ds) E_s + i W0 (E_i+ + E_i-) + i sqrt(theta P_s)
//   0 = -(a_+ + i d+) E_i+ + i W0 E_s
//   0 = -(a_- + i d-) E_i- + i W0 E_s
inline FieldSolution steady_state(const RingParams& ring, const CouplingSet& c,
                                  const SignalInput& sig) {
    if (!(ring.alpha_s() > 0.0 && ring.alpha_ip() > 0.0 && ring.alpha_im() > 0.0))
        throw ValidationError("steady_state: alpha must be positive (dissipative system)");
    if (sig.power < 0.0) throw ArgumentError("steady_state: signal power must be non-negative");
    const detail::ModeRates m = detail::mode_rates(ring, c);
    const double cond = detail::condition_estimate(m, c.omega0);
    if (cond > kConditionLimit)
        throw IllConditionedError("steady_state: condition estimate " + std::to_string(cond) +
                                      " exceeds 1e12",
                                  cond);
    const complexd i_unit{0.0, 1.0};
    const complexd drive = i_unit * std::sqrt(ring.signal.theta * sig.power);
    complexd e_s, e_ip, e_im;
    detail::solve_rhs(m, c.omega0, drive, complexd{0.0, 0.0}, complexd{0.0, 0.0}, e_s, e_ip, e_im);
    return detail::assemble_solution(ring, sig, e_s, e_ip, e_im, cond);
}

// --- extended idler basis ---------------------------------------------------

// One chain mode at frequency offset n * |w_p1 - w_p2| from the signal.
struct ChainMode {
    int order = 0;           // n, signal at 0
    complexd field{0.0, 0.0};
    double p_out = 0.0;      // W (idlers only; 0 for the signal row)
    double efficiency = 0.0;
};

struct ExtendedSolution {
    std::vector<ChainMode> modes;       // orders -K .. K
    double transmission = 0.0;
    double total_converted = 0.0;       // sum of all idler efficiencies
    double higher_order = 0.0;          // |n| >= 2 share
    const ChainMode& mode(int order) const { return modes.at(static_cast<std::size_t>(order + k)); }
    int k = 0;
};

// Chain-coupled generalization: every mode at offset n couples to n±1 through
// the same Omega0; detunings follow delta_n = delta_s + n W1 + n^2 W2.
// K = 1 reduces exactly to steady_state.
inline ExtendedSolution extended_basis_solve(const RingParams& ring, const CouplingSet& c,
                                             const SignalInput& sig, int orders_k) {
    if (orders_k < 1) throw ArgumentError("extended_basis_solve: K must be >= 1");
    if (orders_k > 16)
        throw ArgumentError("extended_basis_solve: K > 16 exceeds dispersion-model validity");
    const int n_modes = 2 * orders_k + 1;
    const complexd i_unit{0.0, 1.0};
    const double theta = ring.signal.theta;

    // Dense complex Gaussian elimination with partial pivoting; the system is
    // small (<= 33 rows) and tridiagonal in structure.
    std::vector<std::vector<complexd>> a(n_modes, std::vector<complexd>(n_modes, complexd{0, 0}));
    std::vector<complexd> b(n_modes, complexd{0, 0});
    for (int row = 0; row < n_modes; ++row) {
        const int n = row - orders_k;
        const double dn = c.delta_s + n * c.omega1 + static_cast<double>(n) * n * c.omega2;
        a[row][row] = complexd{ring.signal.alpha, dn};
        if (row > 0) a[row][row - 1] = -i_unit * c.omega0;
        if (row + 1 < n_modes) a[row][row + 1] = -i_unit * c.omega0;
    }
    b[orders_k] = i_unit * std::sqrt(theta * sig.power);

    for (int col = 0; col < n_modes; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n_modes; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n_modes; ++r) {
            if (a[r][col] == complexd{0, 0}) continue;
            const complexd f = a[r][col] / a[col][col];
            for (int k2 = col; k2 < n_modes; ++k2) a[r][k2] -= f * a[col][k2];
            b[r] -= f * b[col];
        }
    }
    std::vector<complexd> e(n_modes);
    for (int row = n_modes - 1; row >= 0; --row) {
        complexd s = b[row];
        for (int k2 = row + 1; k2 < n_modes; ++k2) s -= a[row][k2] * e[k2];
        e[row] = s / a[row][row];
    }

    ExtendedSolution out;
    out.k = orders_k;
    out.modes.resize(static_cast<std::size_t>(n_modes));
    for (int row = 0; row < n_modes; ++row) {
        ChainMode& cm = out.modes[static_cast<std::size_t>(row)];
        cm.order = row - orders_k;
        cm.field = e[row];
        if (cm.order != 0) {
            cm.p_out = theta * std::norm(cm.field);
            cm.efficiency = sig.power > 0.0 ? cm.p_out / sig.power : 0.0;
            out.total_converted += cm.efficiency;
            if (std::abs(cm.order) >= 2) out.higher_order += cm.efficiency;
        }
    }
    const complexd remnant = std::sqrt(sig.power) + i_unit * std::sqrt(theta) * e[orders_k];
    out.transmission = sig.power > 0.0 ? std::norm(remnant) / sig.power : 1.0;
    return out;
}

// --- transmission spectrum -------------------------------------------------

struct TransmissionPoint {
    double offset_hz = 0.0;   // laser offset from the cold resonance
    double transmission = 0.0;
    double eta_ip = 0.0;
    double eta_im = 0.0;
};

struct TransmissionSpectrum {
    std::vector<TransmissionPoint> points;
    double dip_fwhm_hz = 0.0;
    double dip_min = 0.0;
    double dip_offset_hz = 0.0;   // location of the minimum
};

namespace detail {

// Half-depth width of a dip in (x, y) samples; linear interpolation at the
// crossings. Returns 0 when the dip does not recover to its wings.
inline double dip_fwhm(const std::vector<double>& x, const std::vector<double>& y,
                       std::size_t* min_index = nullptr) {
    std::size_t i_min = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] < y[i_min]) i_min = i;
    if (min_index) *min_index = i_min;
    const double wing = std::max(y.front(), y.back());
    const double half = 0.5 * (wing + y[i_min]);
    double left = x.front(), right = x.back();
    bool found_l = false, found_r = false;
    for (std::size_t i = i_min; i-- > 0;) {
        if (y[i] >= half) {
            const double t = (half - y[i]) / (y[i + 1] - y[i]);
            left = x[i] + t * (x[i + 1] - x[i]);
            found_l = true;
            break;
        }
    }
    for (std::size_t i = i_min + 1; i < y.size(); ++i) {
        if (y[i] >= half) {
            const double t = (half - y[i - 1]) / (y[i] - y[i - 1]);
            right = x[i - 1] + t * (x[i] - x[i - 1]);
            found_r = true;
            break;
        }
    }
    return (found_l && found_r) ? (right - left) : 0.0;
}

} // namespace detail

// Transmission versus laser offset. The scan shifts all three detunings
// together: delta_k(f) = delta_k(0) - 2 pi f t_R.
inline TransmissionSpectrum transmission_spectrum(const RingParams& ring, const CouplingSet& base,
                                                  const SignalInput& sig,
                                                  const std::vector<double>& offsets_hz) {
    if (offsets_hz.empty()) throw ArgumentError("transmission_spectrum: empty detuning grid");
    const double span = offsets_hz.back() - offsets_hz.front();
    if (span < 5.0 * ring.signal.loaded_linewidth_hz())
        throw ArgumentError("transmission_spectrum: grid must span at least 5 loaded linewidths");
    TransmissionSpectrum out;
    out.points.reserve(offsets_hz.size());
    std::vector<double> ts;
    ts.reserve(offsets_hz.size());
    for (double f : offsets_hz) {
        CouplingSet c = base;
        c.delta_s = base.delta_s - kTwoPi * f * ring.round_trip_time;
        const FieldSolution sol = steady_state(ring, c, sig);
        out.points.push_back(TransmissionPoint{f, sol.transmission, sol.eta_ip, sol.eta_im});
        ts.push_back(sol.transmission);
    }
    std::size_t i_min = 0;
    out.dip_fwhm_hz = detail::dip_fwhm(offsets_hz, ts, &i_min);
    out.dip_min = ts[i_min];
    out.dip_offset_hz = offsets_hz[i_min];
    return out;
}

// --- Omega0 calibration ----------------------------------------------------

enum class CalibrationBranch { Low, High };

// Omega0 that makes the on-resonance blue-idler efficiency match a target,
// holding ring and mismatch parameters fixed. The efficiency versus Omega0
// rises to a single peak and falls (over-conversion); the branch selects
// which side of the peak to return.
inline double calibrate_omega0(const RingParams& ring, double omega1, double omega2,
                               double target_eta_blue, CalibrationBranch branch,
                               double delta_s = 0.0) {
    if (!(target_eta_blue > 0.0) || target_eta_blue >= 1.0)
        throw ArgumentError("calibrate_omega0: target efficiency must be in (0, 1)");
    const SignalInput probe{1e-6, 0.0};
    auto eta = [&](double w0) {
        CouplingSet c;
        c.omega0 = w0;
        c.delta_s = delta_s;
        c.omega1 = omega1;
        c.omega2 = omega2;
        return steady_state(ring, c, probe).eta_ip;
    };
    const double alpha = ring.alpha_s();
    double lo = 1e-9 * alpha, hi = 64.0 * alpha;
    // Golden-section for the peak.
    const double gr = 0.6180339887498949;
    double a = lo, d = hi;
    double b = d - gr * (d - a), cpt = a + gr * (d - a);
    double fb = eta(b), fc = eta(cpt);
    for (int it = 0; it < 200; ++it) {
        if (fb > fc) { d = cpt; cpt = b; fc = fb; b = d - gr * (d - a); fb = eta(b); }
        else { a = b; b = cpt; fb = fc; cpt = a + gr * (d - a); fc = eta(cpt); }
    }
    const double w_peak = 0.5 * (a + d);
    const double eta_peak = eta(w_peak);
    if (eta_peak < target_eta_blue)
        throw ArgumentError("calibrate_omega0: target efficiency " + std::to_string(target_eta_blue) +
                            " above achievable maximum " + std::to_string(eta_peak));
    double x_lo = branch == CalibrationBranch::Low ? lo : w_peak;
    double x_hi = branch == CalibrationBranch::Low ? w_peak : hi;
    // Bisection: eta is monotone on each side of the peak.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (x_lo + x_hi);
        const bool below = eta(mid) < target_eta_blue;
        const bool move_lo = (branch == CalibrationBranch::Low) ? below : !below;
        if (move_lo) x_lo = mid; else x_hi = mid;
    }
    return 0.5 * (x_lo + x_hi);
}

} // namespace ringfc

#endif // RINGFC_CMT_HPP
