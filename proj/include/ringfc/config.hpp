#ifndef RINGFC_CONFIG_HPP
#define RINGFC_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ringfc/cmt.hpp"
#include "ringfc/constants.hpp"
#include "ringfc/dispersion.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/ring.hpp"
#include "ringfc/spectral.hpp"

namespace ringfc {

// --- unit-suffixed quantities ----------------------------------------------

enum class UnitKind { None, Frequency, Power, Length, Time, Temperature };

struct Quantity {
    double value = 0.0;   // SI after suffix normalization
    UnitKind kind = UnitKind::None;
};

inline Quantity parse_quantity(const std::string& text) {
    static const std::map<std::string, std::pair<double, UnitKind>> kUnits = {
        {"THz", {1e12, UnitKind::Frequency}}, {"GHz", {1e9, UnitKind::Frequency}},
        {"MHz", {1e6, UnitKind::Frequency}},  {"kHz", {1e3, UnitKind::Frequency}},
        {"Hz", {1.0, UnitKind::Frequency}},
        {"W", {1.0, UnitKind::Power}},        {"mW", {1e-3, UnitKind::Power}},
        {"uW", {1e-6, UnitKind::Power}},      {"nW", {1e-9, UnitKind::Power}},
        {"pW", {1e-12, UnitKind::Power}},     {"fW", {1e-15, UnitKind::Power}},
        {"m", {1.0, UnitKind::Length}},       {"mm", {1e-3, UnitKind::Length}},
        {"um", {1e-6, UnitKind::Length}},     {"nm", {1e-9, UnitKind::Length}},
        {"pm", {1e-12, UnitKind::Length}},
        {"s", {1.0, UnitKind::Time}},         {"ms", {1e-3, UnitKind::Time}},
        {"us", {1e-6, UnitKind::Time}},       {"ns", {1e-9, UnitKind::Time}},
        {"ps", {1e-12, UnitKind::Time}},
        {"C", {1.0, UnitKind::Temperature}},  {"K", {1.0, UnitKind::Temperature}},
    };
    std::size_t pos = 0;
    double value;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    std::string suffix = text.substr(pos);
    while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.front()))) suffix.erase(0, 1);
    while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.back()))) suffix.pop_back();
    if (suffix.empty()) return Quantity{value, UnitKind::None};
    auto it = kUnits.find(suffix);
    if (it == kUnits.end()) throw ConfigError("unknown unit suffix '" + suffix + "'");
    return Quantity{value * it->second.first, it->second.second};
}

// --- raw sectioned key-value text --------------------------------------------

struct ConfigEntry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct ParsedConfig {
    std::string raw_text;
    // key: "section/keyname"
    std::map<std::string, ConfigEntry> entries;

    bool has(const std::string& section, const std::string& key) const {
        return entries.count(section + "/" + key) > 0;
    }
    const ConfigEntry& at(const std::string& section, const std::string& key) const {
        auto it = entries.find(section + "/" + key);
        if (it == entries.end())
            throw ConfigError("missing required key '" + key + "' in section [" + section + "]");
        it->second.used = true;
        return it->second;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace detail

inline ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    cfg.raw_text = text;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    bool any_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        any_content = true;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError("parse error at line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = detail::trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty())
                throw ConfigError("parse error at line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("parse error at line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("parse error at line " + std::to_string(line_no) + ": empty key or value");
        if (section.empty())
            throw ConfigError("parse error at line " + std::to_string(line_no) + ": key outside any section");
        const std::string full = section + "/" + key;
        if (cfg.entries.count(full))
            throw ConfigError("parse error at line " + std::to_string(line_no) + ": duplicate key '" + key +
                              "' in section [" + section + "]");
        cfg.entries[full] = ConfigEntry{value, line_no, false};
    }
    if (!any_content) throw ConfigError("parse error at line 1: empty configuration");
    return cfg;
}

// FNV-1a 64-bit of the raw config text, as provenance for emitted reports.
inline std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// --- run configuration ---------------------------------------------------------

enum class CalibrationMode { EfficiencyTarget, FirstPrinciples };

struct SweepDef {
    double from = 0.0;
    double to = 0.0;
    int points = 0;
};

struct BudgetFractions {
    double blue = 0.0;
    double red = 0.0;
    double higher_order = 0.0;
};

struct NoiseConfig {
    double power_w = 0.0;
    double wavelength_m = 0.0;
    double repetition_rate_hz = 0.0;
    double time_bin_s = 0.0;
    double signal_photons_per_pulse = 0.0;
    double reference_efficiency = 0.0;
};

struct RunConfig {
    std::string raw_text;
    std::string hash;

    RingParams ring;
    double ring_width_m = 0.0;   // metadata
    double group_index = 0.0;

    DispersionModel dispersion;
    ThermalTuner thermal;

    double pump_power_1 = 0.0;
    double pump_power_2 = 0.0;
    std::int64_t separation_modes = 1;
    double pump_detuning_1 = 0.0;
    double pump_detuning_2 = 0.0;

    CalibrationMode calibration = CalibrationMode::EfficiencyTarget;
    double target_blue_efficiency = 0.0;
    CalibrationBranch calibration_branch = CalibrationBranch::High;

    double signal_wavelength_m = 0.0;
    double signal_power_w = 0.0;
    LineShape signal_shape;       // center filled in by operating_point

    SweepDef sweep;
    BudgetFractions budget;
    NoiseConfig noise;

    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

namespace detail {

inline double need(const ParsedConfig& cfg, const std::string& section, const std::string& key,
                   UnitKind kind) {
    const ConfigEntry& e = cfg.at(section, key);
    Quantity q;
    try {
        q = parse_quantity(e.value);
    } catch (const ConfigError& err) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key + "': " + err.what());
    }
    if (q.kind != kind && q.kind != UnitKind::None)
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key + "' has wrong unit kind");
    return q.value;
}

inline double optional_or(const ParsedConfig& cfg, const std::string& section, const std::string& key,
                          UnitKind kind, double fallback) {
    if (!cfg.has(section, key)) return fallback;
    return need(cfg, section, key, kind);
}

inline std::string need_word(const ParsedConfig& cfg, const std::string& section, const std::string& key) {
    const ConfigEntry& e = cfg.at(section, key);
    return e.value;
}

// QD line presets: the two measured-width variants, neither privileged.
inline LineShape named_lineshape(const std::string& name) {
    LineShape s;
    if (name == "qd-2.75") {
        // Voigt with equal components combining to a 2.75 GHz total width.
        s.kind = ShapeKind::Voigt;
        s.fwhm_lorentz_hz = 2.75e9 / 1.6375925;
        s.fwhm_gauss_hz = 2.75e9 / 1.6375925;
        return s;
    }
    if (name == "qd-2.87") {
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 2.87e9;
        return s;
    }
    throw ConfigError("unknown lineshape '" + name + "'");
}

} // namespace detail

inline const char* paper_device_preset_text();

inline RunConfig load_config_text(const std::string& text) {
    const ParsedConfig cfg = parse_config_text(text);

    // Strict mode: every key must belong to the known vocabulary.
    static const std::set<std::string> kSections = {
        "ring", "ring.signal", "ring.pump", "nonlinear", "dispersion.signal", "dispersion.pump",
        "thermal", "pumps", "signal", "sweep", "budget", "noise", "run"};
    static const std::map<std::string, std::set<std::string>> kKeys = {
        {"ring", {"radius", "width", "group_index"}},
        {"ring.signal", {"wavelength", "intrinsic_q", "loaded_linewidth", "coupling_q",
                         "alpha_signal", "alpha_idler_plus", "alpha_idler_minus"}},
        {"ring.pump", {"wavelength", "intrinsic_q", "loaded_linewidth", "coupling_q"}},
        {"nonlinear", {"gamma_signal", "gamma_pump", "calibration", "target_blue_efficiency",
                       "calibration_branch"}},
        {"dispersion.signal", {"m0", "fsr", "d2", "d3", "window"}},
        {"dispersion.pump", {"m0", "fsr", "d2", "d3", "window"}},
        {"thermal", {"rate", "reference_temperature", "min_temperature", "max_temperature"}},
        {"pumps", {"power_1", "power_2", "separation_modes", "detuning_1", "detuning_2"}},
        {"signal", {"power", "lineshape", "fwhm", "lorentzian_fwhm", "gaussian_fwhm"}},
        {"sweep", {"from", "to", "points"}},
        {"budget", {"blue_fraction", "red_fraction", "higher_order_fraction"}},
        {"noise", {"power", "wavelength", "repetition_rate", "time_bin", "signal_photons_per_pulse",
                   "reference_efficiency"}},
        {"run", {"seed", "out_dir"}},
    };
    for (const auto& [full, entry] : cfg.entries) {
        const std::size_t slash = full.find('/');
        const std::string section = full.substr(0, slash);
        const std::string key = full.substr(slash + 1);
        if (!kSections.count(section))
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown section [" + section + "]");
        const auto& allowed = kKeys.at(section);
        const bool dynamic_offset =
            (section == "dispersion.signal" || section == "dispersion.pump") &&
            key.rfind("mode_offset.", 0) == 0;
        if (!allowed.count(key) && !dynamic_offset)
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key +
                              "' in section [" + section + "]");
    }

    RunConfig rc;
    rc.raw_text = cfg.raw_text;
    rc.hash = config_hash(cfg.raw_text);

    // [ring]
    rc.ring.radius = detail::need(cfg, "ring", "radius", UnitKind::Length);
    rc.ring_width_m = detail::optional_or(cfg, "ring", "width", UnitKind::Length, 0.0);
    rc.group_index = detail::need(cfg, "ring", "group_index", UnitKind::None);
    if (!(rc.ring.radius > 0.0)) throw ValidationError("RingParams: radius R must be positive");
    if (!(rc.group_index > 0.0)) throw ValidationError("RingParams: group index must be positive");
    rc.ring.circumference = kTwoPi * rc.ring.radius;
    rc.ring.round_trip_time = rc.group_index * rc.ring.circumference / kSpeedOfLight;

    // [ring.signal] / [ring.pump]
    auto build_band = [&](const std::string& section) {
        const double lambda = detail::need(cfg, section, "wavelength", UnitKind::Length);
        if (!(lambda > 0.0)) throw ValidationError("RingParams: band wavelength must be positive");
        const double omega = kTwoPi * kSpeedOfLight / lambda;
        const double qi = detail::need(cfg, section, "intrinsic_q", UnitKind::None);
        if (!(qi > 0.0)) throw ValidationError("RingParams: intrinsic quality Q_i must be positive");
        const bool has_lw = cfg.has(section, "loaded_linewidth");
        const bool has_qc = cfg.has(section, "coupling_q");
        if (has_lw == has_qc)
            throw ConfigError("section [" + section +
                              "] needs exactly one of loaded_linewidth or coupling_q");
        if (has_lw) {
            const double lw = detail::need(cfg, section, "loaded_linewidth", UnitKind::Frequency);
            if (!(lw > 0.0)) throw ValidationError("RingParams: loaded linewidth must be positive");
            return band_from_linewidth(omega, rc.ring.round_trip_time, lw, qi);
        }
        const double qc = detail::need(cfg, section, "coupling_q", UnitKind::None);
        if (!(qc > 0.0)) throw ValidationError("RingParams: coupling quality Q_c must be positive");
        return band_from_qs(omega, rc.ring.round_trip_time, qi, qc);
    };
    rc.ring.signal = build_band("ring.signal");
    rc.ring.pump = build_band("ring.pump");
    if (cfg.has("ring.signal", "alpha_signal"))
        rc.ring.alpha_signal_override = detail::need(cfg, "ring.signal", "alpha_signal", UnitKind::None);
    if (cfg.has("ring.signal", "alpha_idler_plus"))
        rc.ring.alpha_idler_plus_override =
            detail::need(cfg, "ring.signal", "alpha_idler_plus", UnitKind::None);
    if (cfg.has("ring.signal", "alpha_idler_minus"))
        rc.ring.alpha_idler_minus_override =
            detail::need(cfg, "ring.signal", "alpha_idler_minus", UnitKind::None);

    // [nonlinear] -- gammas are required explicitly; no silent defaults.
    rc.ring.gamma_signal = detail::need(cfg, "nonlinear", "gamma_signal", UnitKind::None);
    rc.ring.gamma_pump = detail::need(cfg, "nonlinear", "gamma_pump", UnitKind::None);
    const std::string cal = detail::need_word(cfg, "nonlinear", "calibration");
    if (cal == "efficiency") rc.calibration = CalibrationMode::EfficiencyTarget;
    else if (cal == "first-principles") rc.calibration = CalibrationMode::FirstPrinciples;
    else throw ConfigError("nonlinear.calibration must be 'efficiency' or 'first-principles'");
    rc.target_blue_efficiency =
        detail::optional_or(cfg, "nonlinear", "target_blue_efficiency", UnitKind::None, 0.0);
    if (rc.calibration == CalibrationMode::EfficiencyTarget &&
        !(rc.target_blue_efficiency > 0.0 && rc.target_blue_efficiency < 1.0))
        throw ConfigError("nonlinear.target_blue_efficiency must lie in (0, 1) for efficiency calibration");
    const std::string branch =
        cfg.has("nonlinear", "calibration_branch")
            ? detail::need_word(cfg, "nonlinear", "calibration_branch") : std::string("high");
    if (branch == "high") rc.calibration_branch = CalibrationBranch::High;
    else if (branch == "low") rc.calibration_branch = CalibrationBranch::Low;
    else throw ConfigError("nonlinear.calibration_branch must be 'high' or 'low'");

    validate(rc.ring);

    // [dispersion.*]
    auto build_disp = [&](const std::string& section, double omega_center) {
        BandDispersion b;
        b.m0 = static_cast<std::int64_t>(detail::need(cfg, section, "m0", UnitKind::None));
        b.d1 = kTwoPi * detail::need(cfg, section, "fsr", UnitKind::Frequency);
        b.d2 = kTwoPi * detail::optional_or(cfg, section, "d2", UnitKind::Frequency, 0.0);
        b.d3 = kTwoPi * detail::optional_or(cfg, section, "d3", UnitKind::Frequency, 0.0);
        b.window = static_cast<std::int64_t>(detail::optional_or(cfg, section, "window", UnitKind::None, 50));
        b.omega0 = omega_center;
        for (const auto& [full, entry] : cfg.entries) {
            const std::string prefix = section + "/mode_offset.";
            if (full.rfind(prefix, 0) != 0) continue;
            entry.used = true;
            const std::string idx = full.substr(prefix.size());
            std::int64_t rel;
            try {
                rel = std::stoll(idx);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(entry.line) +
                                  ": mode_offset index must be an integer");
            }
            Quantity q = parse_quantity(entry.value);
            if (q.kind != UnitKind::Frequency && q.kind != UnitKind::None)
                throw ConfigError("line " + std::to_string(entry.line) + ": mode_offset must be a frequency");
            b.mode_offsets[rel] = kTwoPi * q.value;
        }
        return b;
    };
    rc.dispersion.signal = build_disp("dispersion.signal", rc.ring.signal.omega_hat);
    rc.dispersion.pump = build_disp("dispersion.pump", rc.ring.pump.omega_hat);

    // [thermal]
    rc.thermal.rate_m_per_k = detail::need(cfg, "thermal", "rate", UnitKind::Length);
    rc.thermal.reference_temperature_c =
        detail::need(cfg, "thermal", "reference_temperature", UnitKind::Temperature);
    rc.thermal.min_temperature_c = detail::need(cfg, "thermal", "min_temperature", UnitKind::Temperature);
    rc.thermal.max_temperature_c = detail::need(cfg, "thermal", "max_temperature", UnitKind::Temperature);
    rc.dispersion.thermal_rate = rc.thermal.rate_m_per_k;
    validate(rc.dispersion);

    // [pumps]
    rc.pump_power_1 = detail::need(cfg, "pumps", "power_1", UnitKind::Power);
    rc.pump_power_2 = detail::need(cfg, "pumps", "power_2", UnitKind::Power);
    rc.separation_modes =
        static_cast<std::int64_t>(detail::need(cfg, "pumps", "separation_modes", UnitKind::None));
    rc.pump_detuning_1 = detail::optional_or(cfg, "pumps", "detuning_1", UnitKind::None, 0.0);
    rc.pump_detuning_2 = detail::optional_or(cfg, "pumps", "detuning_2", UnitKind::None, 0.0);
    if (rc.pump_power_1 < 0.0 || rc.pump_power_2 < 0.0)
        throw ValidationError("PumpConfig: pump powers must be non-negative");
    if (rc.separation_modes < 1)
        throw ValidationError("PumpConfig: mode separation mu must be >= 1");

    // [signal]
    rc.signal_wavelength_m = frequency_to_wavelength(rc.ring.signal.omega_hat / kTwoPi);
    rc.signal_power_w = detail::need(cfg, "signal", "power", UnitKind::Power);
    if (rc.signal_power_w < 0.0) throw ValidationError("SignalInput: power must be non-negative");
    const std::string shape = detail::need_word(cfg, "signal", "lineshape");
    if (shape == "delta") {
        rc.signal_shape.kind = ShapeKind::Delta;
    } else if (shape == "lorentzian") {
        rc.signal_shape.kind = ShapeKind::Lorentzian;
        rc.signal_shape.fwhm_lorentz_hz = detail::need(cfg, "signal", "fwhm", UnitKind::Frequency);
    } else if (shape == "gaussian") {
        rc.signal_shape.kind = ShapeKind::Gaussian;
        rc.signal_shape.fwhm_gauss_hz = detail::need(cfg, "signal", "fwhm", UnitKind::Frequency);
    } else if (shape == "voigt") {
        rc.signal_shape.kind = ShapeKind::Voigt;
        rc.signal_shape.fwhm_lorentz_hz = detail::need(cfg, "signal", "lorentzian_fwhm", UnitKind::Frequency);
        rc.signal_shape.fwhm_gauss_hz = detail::need(cfg, "signal", "gaussian_fwhm", UnitKind::Frequency);
    } else {
        rc.signal_shape = detail::named_lineshape(shape);
    }
    validate(rc.signal_shape);

    // [sweep]
    rc.sweep.from = detail::need(cfg, "sweep", "from", UnitKind::Frequency);
    rc.sweep.to = detail::need(cfg, "sweep", "to", UnitKind::Frequency);
    rc.sweep.points = static_cast<int>(detail::need(cfg, "sweep", "points", UnitKind::None));
    if (rc.sweep.points < 2) throw ValidationError("RunConfig: sweep needs at least 2 points");
    if (!(rc.sweep.to > rc.sweep.from)) throw ValidationError("RunConfig: sweep range is empty");

    // [budget]
    rc.budget.blue = detail::need(cfg, "budget", "blue_fraction", UnitKind::None);
    rc.budget.red = detail::need(cfg, "budget", "red_fraction", UnitKind::None);
    rc.budget.higher_order = detail::need(cfg, "budget", "higher_order_fraction", UnitKind::None);
    for (double f : {rc.budget.blue, rc.budget.red, rc.budget.higher_order})
        if (f < 0.0 || f > 1.0) throw ValidationError("EfficiencyBudget: fractions must lie in [0, 1]");

    // [noise]
    rc.noise.power_w = detail::need(cfg, "noise", "power", UnitKind::Power);
    rc.noise.wavelength_m = detail::need(cfg, "noise", "wavelength", UnitKind::Length);
    rc.noise.repetition_rate_hz = detail::need(cfg, "noise", "repetition_rate", UnitKind::Frequency);
    rc.noise.time_bin_s = detail::need(cfg, "noise", "time_bin", UnitKind::Time);
    rc.noise.signal_photons_per_pulse =
        detail::need(cfg, "noise", "signal_photons_per_pulse", UnitKind::None);
    rc.noise.reference_efficiency = detail::need(cfg, "noise", "reference_efficiency", UnitKind::None);

    // [run] (optional)
    rc.seed = static_cast<std::uint64_t>(detail::optional_or(cfg, "run", "seed", UnitKind::None, 0.0));
    if (cfg.has("run", "out_dir")) rc.out_dir = detail::need_word(cfg, "run", "out_dir");

    return rc;
}

// Load from a filesystem path or a bundled preset name.
inline RunConfig load_config(const std::string& path_or_preset) {
    std::ifstream in(path_or_preset);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return load_config_text(ss.str());
    }
    if (path_or_preset == "paper-device") return load_config_text(paper_device_preset_text());
    throw ConfigError("no such config file or bundled preset: '" + path_or_preset + "'");
}

// --- operating point ------------------------------------------------------------

// Everything needed to run the converter model at the configured signal mode:
// pumps built up and snapped to pump-band modes, detunings from the
// dispersion model (signal assumed temperature-tuned onto its mode), and
// Omega0 either calibrated to the target efficiency or taken from the pump
// fields and Kerr coefficients.
struct OperatingPoint {
    RingParams ring;
    DispersionModel dispersion;
    PumpConfig pumps;
    ModeAssignment assignment;
    CouplingSet couplings;
    double signal_center_hz = 0.0;  // absolute frequency where delta_s applies
    double shift_hz = 0.0;          // idler offset |w_p1 - w_p2| / 2pi
};

inline OperatingPoint operating_point(const RunConfig& rc) {
    OperatingPoint op;
    op.ring = rc.ring;
    op.dispersion = rc.dispersion;

    op.pumps.power_1 = rc.pump_power_1;
    op.pumps.power_2 = rc.pump_power_2;
    op.pumps.m_p1 = rc.dispersion.pump.m0;
    op.pumps.m_p2 = rc.dispersion.pump.m0 + rc.separation_modes;
    op.pumps.omega_p1 = mode_frequency(rc.dispersion, Band::Pump, op.pumps.m_p1);
    op.pumps.omega_p2 = mode_frequency(rc.dispersion, Band::Pump, op.pumps.m_p2);
    op.pumps = pump_buildup(rc.ring, op.pumps, rc.pump_detuning_1, rc.pump_detuning_2);

    const double omega_s_target = kTwoPi * kSpeedOfLight / rc.signal_wavelength_m;
    op.assignment = assign_modes(rc.dispersion, omega_s_target, op.pumps.omega_p1, op.pumps.omega_p2);
    // Temperature tuning puts the signal exactly on its mode.
    const double omega_s = mode_frequency(rc.dispersion, Band::Signal, op.assignment.m_s);
    const SignalBandDetunings d =
        detunings(rc.dispersion, op.assignment, omega_s, op.pumps.omega_p1, op.pumps.omega_p2, rc.ring);

    double w0;
    if (rc.calibration == CalibrationMode::EfficiencyTarget) {
        w0 = calibrate_omega0(rc.ring, d.omega1(), d.omega2(), rc.target_blue_efficiency,
                              rc.calibration_branch, d.delta_s);
    } else {
        w0 = omega0(rc.ring, op.pumps);
    }
    op.couplings = CouplingSet::from_detunings(w0, d.delta_s, d.delta_ip, d.delta_im);
    op.signal_center_hz = omega_s / kTwoPi;
    op.shift_hz = op.pumps.pump_gap() / kTwoPi;
    return op;
}

// --- bundled preset ----------------------------------------------------------------

inline const char* paper_device_preset_text() {
    return R"CFG(# ringfc bundled preset: paper-device
# Si3N4 microring frequency converter: 917.78 nm signal band, two C-band pumps
# one FSR apart, overcoupled signal band (loaded 1.12 GHz, intrinsic ~200 MHz).

[ring]
radius = 40 um
width = 1450 nm      # metadata
group_index = 2.0

[ring.signal]
wavelength = 917.78 nm
intrinsic_q = 1.6e6
loaded_linewidth = 1.12 GHz

[ring.pump]
wavelength = 1550 nm
intrinsic_q = 1.6e6
coupling_q = 1.6e6   # critically coupled pump band

[nonlinear]
# Si3N4 Kerr coefficients, n2 ~ 2.5e-19 m^2/W with sub-um^2 mode areas
gamma_signal = 3.4
gamma_pump = 1.8
calibration = efficiency
target_blue_efficiency = 0.31
calibration_branch = high

[dispersion.signal]
m0 = 570
fsr = 573.2 GHz
d2 = 10 MHz
d3 = 0 Hz
window = 60
# measured shift of the two idler neighbors against the quadratic comb
mode_offset.+1 = 314.2 MHz
mode_offset.-1 = 314.2 MHz

[dispersion.pump]
m0 = 337
fsr = 573.2 GHz
d2 = 0 Hz
d3 = 0 Hz
window = 60

[thermal]
rate = 13.67 pm      # per kelvin
reference_temperature = 22 C
min_temperature = 5 C
max_temperature = 95 C

[pumps]
power_1 = 10 mW
power_2 = 10 mW
separation_modes = 1
detuning_1 = 0
detuning_2 = 0

[signal]
power = 1 uW
lineshape = delta

[sweep]
from = 0 GHz
to = 6 GHz
points = 100

[budget]
blue_fraction = 0.31
red_fraction = 0.26
higher_order_fraction = 0.16

[noise]
power = 3.2 fW
wavelength = 916.17 nm
repetition_rate = 80 MHz
time_bin = 2 ns
signal_photons_per_pulse = 0.01
reference_efficiency = 0.10
)CFG";
}

} // namespace ringfc

#endif // RINGFC_CONFIG_HPP
