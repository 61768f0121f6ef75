#ifndef RINGFC_SWEEPS_HPP
#define RINGFC_SWEEPS_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ringfc/cmt.hpp"
#include "ringfc/config.hpp"
#include "ringfc/constants.hpp"
#include "ringfc/errors.hpp"
#include "ringfc/photonstats.hpp"
#include "ringfc/spectral.hpp"

namespace ringfc {

using ordered_json = nlohmann::ordered_json;

// Tabular result with a fixed column order; emitted as CSV or JSON records.
// An optional trailing text column carries per-row labels (channel names).
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string label_column;
    std::vector<std::string> row_labels;   // one per row when label_column set
};

struct RunOutput {
    Table table;
    ordered_json report;   // always carries config_hash
};

// Evaluate fn(i) for i in [0, n) on up to `jobs` threads; results land at
// their index, so the output is independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(workers))
                fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

namespace detail {

inline ordered_json base_report(const RunConfig& rc, const std::string& subcommand) {
    ordered_json j;
    j["subcommand"] = subcommand;
    j["config_hash"] = rc.hash;
    j["seed"] = rc.seed;
    return j;
}

// Omega0 at the on-resonance blue-idler efficiency peak for the given
// mismatch; used where the pump drive is assumed re-optimized.
inline double omega0_at_peak(const RingParams& ring, double w1, double w2, double delta_s = 0.0) {
    const SignalInput probe{1e-6, 0.0};
    auto eta = [&](double w0) {
        CouplingSet c;
        c.omega0 = w0;
        c.delta_s = delta_s;
        c.omega1 = w1;
        c.omega2 = w2;
        return steady_state(ring, c, probe).eta_ip;
    };
    const double alpha = ring.alpha_s();
    double a = 1e-9 * alpha, d = 64.0 * alpha;
    const double gr = 0.6180339887498949;
    double b = d - gr * (d - a), cpt = a + gr * (d - a);
    double fb = eta(b), fc = eta(cpt);
    for (int it = 0; it < 200; ++it) {
        if (fb > fc) { d = cpt; cpt = b; fc = fb; b = d - gr * (d - a); fb = eta(b); }
        else { a = b; b = cpt; fb = fc; cpt = a + gr * (d - a); fc = eta(cpt); }
    }
    return 0.5 * (a + d);
}

} // namespace detail

// --- transmission study (pump-broadened converter bandwidth) -----------------

inline RunOutput run_fig4b(const RunConfig& rc, int jobs = 1) {
    (void)jobs;
    const OperatingPoint op = operating_point(rc);
    const double lw = rc.ring.signal.loaded_linewidth_hz();
    const std::vector<double> grid = uniform_grid(0.0, 6.0 * lw, 1201);
    const SignalInput probe{rc.signal_power_w, kTwoPi * op.signal_center_hz};

    CouplingSet off = op.couplings;
    off.omega0 = 0.0;
    const TransmissionSpectrum linear = transmission_spectrum(rc.ring, off, probe, grid);
    const TransmissionSpectrum pumped = transmission_spectrum(rc.ring, op.couplings, probe, grid);

    RunOutput out;
    out.table.name = "fig4b";
    out.table.columns = {"offset_hz", "transmission_linear", "transmission_pumped"};
    out.table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.table.rows.push_back({grid[i], linear.points[i].transmission, pumped.points[i].transmission});
    out.report = detail::base_report(rc, "fig4b");
    out.report["linear_dip_fwhm_hz"] = linear.dip_fwhm_hz;
    out.report["pumped_dip_fwhm_hz"] = pumped.dip_fwhm_hz;
    out.report["linear_dip_min"] = linear.dip_min;
    out.report["pumped_dip_min"] = pumped.dip_min;
    out.report["omega0"] = op.couplings.omega0;
    return out;
}

// --- conversion efficiency vs input linewidth --------------------------------

inline RunOutput run_fig4c(const RunConfig& rc, int jobs = 1) {
    const OperatingPoint op = operating_point(rc);
    const int n = rc.sweep.points;
    std::vector<double> fwhm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        fwhm[static_cast<std::size_t>(i)] =
            rc.sweep.from + (rc.sweep.to - rc.sweep.from) * static_cast<double>(i) /
            static_cast<double>(n - 1);

    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        LineShape shape;
        shape.center_hz = op.signal_center_hz;
        shape.flux = 1.0;
        if (fwhm[i] <= 0.0) {
            shape.kind = ShapeKind::Delta;
        } else {
            shape.kind = ShapeKind::Lorentzian;
            shape.fwhm_lorentz_hz = fwhm[i];
        }
        const AveragedEfficiency avg = avg_conversion_efficiency(rc.ring, op.couplings, shape);
        rows[i] = {fwhm[i], avg.eta_ip, avg.eta_im};
    });

    RunOutput out;
    out.table.name = "fig4c";
    out.table.columns = {"fwhm_hz", "efficiency_blue", "efficiency_red"};
    out.table.rows = std::move(rows);
    out.report = detail::base_report(rc, "fig4c");
    out.report["narrowband_blue"] = out.table.rows.front()[1];
    out.report["omega0"] = op.couplings.omega0;
    return out;
}

// --- converted-idler and remnant spectra --------------------------------------

inline RunOutput run_fig4ef(const RunConfig& rc, int jobs = 1) {
    (void)jobs;
    const OperatingPoint op = operating_point(rc);
    // Default to the measured QD line when the config input is narrow-band.
    LineShape shape = rc.signal_shape;
    if (shape.kind == ShapeKind::Delta) shape = detail::named_lineshape("qd-2.75");
    shape.center_hz = op.signal_center_hz;
    shape.flux = SignalInput{rc.signal_power_w, kTwoPi * op.signal_center_hz}.photon_flux();

    const std::vector<double> grid = default_grid(rc.ring, shape.center_hz);
    const SampledShape input = sample(shape, grid);
    const Spectrum blue = idler_spectrum(rc.ring, op.couplings, input.spectrum, op.signal_center_hz,
                                         op.shift_hz, Channel::IdlerPlus);
    const Spectrum red = idler_spectrum(rc.ring, op.couplings, input.spectrum, op.signal_center_hz,
                                        op.shift_hz, Channel::IdlerMinus);
    const Spectrum rem = remnant_spectrum(rc.ring, op.couplings, input.spectrum, op.signal_center_hz);

    RunOutput out;
    out.table.name = "fig4ef";
    out.table.columns = {"frequency_hz", "density_per_hz"};
    out.table.label_column = "channel";
    auto append = [&](const Spectrum& s) {
        for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
            out.table.rows.push_back({s.frequency_hz[i], s.density[i]});
            out.table.row_labels.emplace_back(channel_label(s.channel));
        }
    };
    append(input.spectrum);
    append(blue);
    append(red);
    append(rem);

    out.report = detail::base_report(rc, "fig4ef");
    out.report["input_fwhm_hz"] = spectrum_fwhm(input.spectrum);
    out.report["idler_blue_fwhm_hz"] = spectrum_fwhm(blue);
    out.report["remnant_dip_present"] = [&] {
        std::size_t ipk = 0;
        for (std::size_t i = 1; i < rem.density.size(); ++i)
            if (rem.density[i] > rem.density[ipk]) ipk = i;
        std::size_t imin = 0;
        double best = rem.density[0];
        for (std::size_t i = 1; i < rem.density.size(); ++i)
            if (rem.frequency_hz[i] > rem.frequency_hz.front() + 1e9 &&
                rem.frequency_hz[i] < rem.frequency_hz.back() - 1e9 && rem.density[i] < best) {
                best = rem.density[i];
                imin = i;
            }
        return rem.density[imin] < 0.9 * rem.density[ipk];
    }();
    try {
        const LinewidthFit idler_fit = fit_linewidth(blue, LineModel::Lorentzian);
        out.report["idler_blue_lorentzian_fit_hz"] = idler_fit.fwhm_hz;
        out.report["idler_blue_lorentzian_fit_sigma_hz"] = idler_fit.fwhm_sigma_hz;
    } catch (const FitError&) {
        out.report["idler_blue_lorentzian_fit_hz"] = nullptr;
    }
    out.report["captured_fraction"] = input.report.captured_fraction;
    return out;
}

// --- loaded-linewidth trade study ----------------------------------------------

inline RunOutput run_figS2(const RunConfig& rc, int jobs = 1) {
    const int n = rc.sweep.points;
    const double lw_min = 0.3e9, lw_max = 6.0e9;
    std::vector<double> loaded(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        loaded[static_cast<std::size_t>(i)] =
            lw_min + (lw_max - lw_min) * static_cast<double>(i) / static_cast<double>(n - 1);

    const OperatingPoint base = operating_point(rc); // mode assignment and pump grid
    const double omega_s = mode_frequency(rc.dispersion, Band::Signal, base.assignment.m_s);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        RingParams variant_ring = rc.ring;
        variant_ring.signal = band_from_linewidth(rc.ring.signal.omega_hat, rc.ring.round_trip_time,
                                                  loaded[i], rc.ring.signal.q_intrinsic);
        const SignalBandDetunings d = detunings(rc.dispersion, base.assignment, omega_s,
                                                base.pumps.omega_p1, base.pumps.omega_p2, variant_ring);
        // Pump drive re-optimized at each coupling point.
        CouplingSet c = CouplingSet::from_detunings(0.0, d.delta_s, d.delta_ip, d.delta_im);
        c.omega0 = detail::omega0_at_peak(variant_ring, c.omega1, c.omega2, c.delta_s);

        double eta[2];
        const double widths[2] = {1.0e9, 2.87e9};
        for (int k = 0; k < 2; ++k) {
            LineShape shape;
            shape.kind = ShapeKind::Lorentzian;
            shape.fwhm_lorentz_hz = widths[k];
            shape.center_hz = omega_s / kTwoPi;
            const AveragedEfficiency avg = avg_conversion_efficiency(variant_ring, c, shape);
            eta[k] = avg.eta_ip;
        }
        rows[i] = {loaded[i], eta[0], eta[1]};
    });

    RunOutput out;
    out.table.name = "figS2";
    out.table.columns = {"loaded_fwhm_hz", "efficiency_blue_input_1ghz", "efficiency_blue_input_2p87ghz"};
    out.table.rows = std::move(rows);
    out.report = detail::base_report(rc, "figS2");
    return out;
}

// --- input-wavelength sweep ------------------------------------------------------

inline RunOutput run_fig5a(const RunConfig& rc, int jobs = 1) {
    const OperatingPoint op = operating_point(rc);
    const int n = rc.sweep.points;
    const double wl_min = 840e-9, wl_max = 980e-9;
    std::vector<double> wl(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        wl[static_cast<std::size_t>(i)] =
            wl_min + (wl_max - wl_min) * static_cast<double>(i) / static_cast<double>(n - 1);

    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        const double omega_target = kTwoPi * kSpeedOfLight / wl[i];
        const ModeAssignment a =
            assign_modes(rc.dispersion, omega_target, op.pumps.omega_p1, op.pumps.omega_p2);
        const double omega_s = mode_frequency(rc.dispersion, Band::Signal, a.m_s);
        const SignalBandDetunings d =
            detunings(rc.dispersion, a, omega_s, op.pumps.omega_p1, op.pumps.omega_p2, rc.ring);
        CouplingSet c = CouplingSet::from_detunings(op.couplings.omega0, d.delta_s, d.delta_ip, d.delta_im);
        const SignalInput probe{rc.signal_power_w, omega_s};
        const FieldSolution sol = steady_state(rc.ring, c, probe);
        rows[i] = {wl[i] * 1e9, sol.eta_ip, sol.eta_im};
    });

    RunOutput out;
    out.table.name = "fig5a";
    out.table.columns = {"wavelength_nm", "efficiency_blue", "efficiency_red"};
    out.table.rows = std::move(rows);
    double mean = 0.0;
    for (const auto& r : out.table.rows) mean += r[1];
    mean /= static_cast<double>(out.table.rows.size());
    out.report = detail::base_report(rc, "fig5a");
    out.report["mean_efficiency_blue"] = mean;
    return out;
}

// --- translation-range sweep -------------------------------------------------------

inline RunOutput run_fig5b(const RunConfig& rc, int jobs = 1, std::int64_t mu_max = 14) {
    (void)jobs;
    const OperatingPoint op = operating_point(rc);
    RunOutput out;
    out.table.name = "fig5b";
    out.table.columns = {"mode_separation", "shift_hz", "shift_nm", "efficiency_blue", "efficiency_red"};
    const double lambda_s = kSpeedOfLight / op.signal_center_hz;
    for (std::int64_t mu = 1; mu <= mu_max; ++mu) {
        PumpConfig pumps = op.pumps;
        pumps.m_p2 = pumps.m_p1 + mu;
        pumps.omega_p2 = mode_frequency(rc.dispersion, Band::Pump, pumps.m_p2);
        ModeAssignment a = op.assignment;
        a.m_p2 = pumps.m_p2;
        a.mu = mu;
        a.m_ip = a.m_s + mu;
        a.m_im = a.m_s - mu;
        const double omega_s = mode_frequency(rc.dispersion, Band::Signal, a.m_s);
        const SignalBandDetunings d =
            detunings(rc.dispersion, a, omega_s, pumps.omega_p1, pumps.omega_p2, rc.ring);
        CouplingSet c = CouplingSet::from_detunings(op.couplings.omega0, d.delta_s, d.delta_ip, d.delta_im);
        const FieldSolution sol = steady_state(rc.ring, c, SignalInput{rc.signal_power_w, omega_s});
        const TranslationRange tr = translation_range(rc.dispersion, mu, lambda_s);
        out.table.rows.push_back({static_cast<double>(mu), tr.shift_hz, tr.shift_m * 1e9,
                                  sol.eta_ip, sol.eta_im});
    }
    out.report = detail::base_report(rc, "fig5b");
    out.report["mu1_blue"] = out.table.rows.front()[3];
    return out;
}

// --- temperature tuning ----------------------------------------------------------

inline RunOutput run_fig5c(const RunConfig& rc, int jobs = 1) {
    (void)jobs;
    RunOutput out;
    out.table.name = "fig5c";
    out.table.columns = {"temperature_c", "shift_pm"};
    const double t0 = rc.thermal.reference_temperature_c;
    const int n = 131;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + 65.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        const TuneState s = thermal_shift(rc.thermal, t);
        out.table.rows.push_back({t, s.shift_m * 1e12});
    }
    out.report = detail::base_report(rc, "fig5c");
    out.report["rate_pm_per_c"] = rc.thermal.rate_m_per_k * 1e12;
    out.report["shift_at_60c_pm"] = rc.thermal.rate_m_per_k * 60.0 * 1e12;
    return out;
}

// --- efficiency-ceiling budget -----------------------------------------------------

struct EfficiencyBudget {
    double blue_fraction = 0.0;
    double red_fraction = 0.0;
    double higher_order_fraction = 0.0;
    double total_converted = 0.0;
    double extraction = 0.0;   // waveguide out-coupling share of the loss
    double ceiling = 0.0;      // total / extraction, capped at 1
};

inline EfficiencyBudget budget(const RingParams& ring, const BudgetFractions& fractions) {
    EfficiencyBudget b;
    b.blue_fraction = fractions.blue;
    b.red_fraction = fractions.red;
    b.higher_order_fraction = fractions.higher_order;
    b.total_converted = fractions.blue + fractions.red + fractions.higher_order;
    b.extraction = extraction_fraction(ring.signal);
    b.ceiling = std::min(1.0, b.total_converted / b.extraction);
    return b;
}

inline RunOutput run_budget(const RunConfig& rc) {
    const EfficiencyBudget b = budget(rc.ring, rc.budget);
    RunOutput out;
    out.table.name = "budget";
    out.table.columns = {"blue_fraction", "red_fraction", "higher_order_fraction", "extraction", "ceiling"};
    out.table.rows.push_back({b.blue_fraction, b.red_fraction, b.higher_order_fraction,
                              b.extraction, b.ceiling});
    out.report = detail::base_report(rc, "budget");
    out.report["blue_fraction"] = b.blue_fraction;
    out.report["red_fraction"] = b.red_fraction;
    out.report["higher_order_fraction"] = b.higher_order_fraction;
    out.report["total_converted"] = b.total_converted;
    out.report["extraction"] = b.extraction;
    out.report["ceiling"] = b.ceiling;
    out.report["intrinsic_linewidth_hz"] = rc.ring.signal.intrinsic_linewidth_hz();
    out.report["coupling_linewidth_hz"] = rc.ring.signal.coupling_linewidth_hz();
    return out;
}

// --- noise budget -------------------------------------------------------------------

inline RunOutput run_noise(const RunConfig& rc) {
    const NoiseBudget b = noise_budget(rc.noise.power_w, rc.noise.wavelength_m,
                                       rc.noise.repetition_rate_hz, rc.noise.time_bin_s,
                                       rc.noise.signal_photons_per_pulse, rc.noise.reference_efficiency);
    RunOutput out;
    out.table.name = "noise";
    out.table.columns = {"noise_flux_per_s", "noise_photons_per_pulse", "snr"};
    out.table.rows.push_back({b.noise_flux, b.noise_photons_per_pulse, b.snr});
    out.report = detail::base_report(rc, "noise");
    out.report["noise_power_w"] = b.noise_power_w;
    out.report["wavelength_m"] = b.wavelength_m;
    out.report["noise_flux_per_s"] = b.noise_flux;
    out.report["noise_photons_per_pulse"] = b.noise_photons_per_pulse;
    out.report["signal_photons_per_pulse"] = b.signal_photons_per_pulse;
    out.report["conversion_efficiency"] = b.conversion_efficiency;
    out.report["snr"] = b.snr;
    return out;
}

// --- one-shot steady state ------------------------------------------------------------

inline RunOutput run_solve(const RunConfig& rc) {
    const OperatingPoint op = operating_point(rc);
    const SignalInput sig{rc.signal_power_w, kTwoPi * op.signal_center_hz};
    const FieldSolution sol = steady_state(rc.ring, op.couplings, sig);
    RunOutput out;
    out.table.name = "solve";
    out.table.columns = {"eta_blue", "eta_red", "transmission", "p_out_blue_w", "p_out_red_w",
                         "p_remnant_w", "p_dissipated_w"};
    out.table.rows.push_back({sol.eta_ip, sol.eta_im, sol.transmission, sol.p_out_ip, sol.p_out_im,
                              sol.p_remnant, sol.p_dissipated});
    out.report = detail::base_report(rc, "solve");
    out.report["omega0"] = op.couplings.omega0;
    out.report["delta_s"] = op.couplings.delta_s;
    out.report["omega1"] = op.couplings.omega1;
    out.report["omega2"] = op.couplings.omega2;
    out.report["eta_blue"] = sol.eta_ip;
    out.report["eta_red"] = sol.eta_im;
    out.report["transmission"] = sol.transmission;
    out.report["balance_defect"] = sol.balance_defect;
    out.report["signal_center_hz"] = op.signal_center_hz;
    out.report["shift_hz"] = op.shift_hz;
    return out;
}

// --- file emission -----------------------------------------------------------------

enum class EmitFormat { Csv, Json, PlotScript };

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

} // namespace detail

inline std::string table_to_csv(const Table& t) {
    const bool labeled = !t.label_column.empty();
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        out += t.columns[c];
        out += (c + 1 < t.columns.size() || labeled) ? "," : "\n";
    }
    if (labeled) out += t.label_column + "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += detail::format_double(row[c]);
            out += (c + 1 < row.size() || labeled) ? "," : "\n";
        }
        if (labeled) out += t.row_labels[r] + "\n";
    }
    return out;
}

inline ordered_json table_to_json(const Table& t) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        ordered_json rec;
        for (std::size_t c = 0; c < row.size(); ++c) rec[t.columns[c]] = row[c];
        if (!t.label_column.empty()) rec[t.label_column] = t.row_labels[r];
        rows.push_back(rec);
    }
    return rows;
}

// Plain gnuplot program referencing the CSV by name.
inline std::string table_to_plot_script(const Table& t) {
    std::string s;
    s += "# gnuplot script for " + t.name + "\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel '" + t.columns.front() + "'\n";
    s += "plot ";
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        s += "'" + t.name + ".csv' using 1:" + std::to_string(c + 1) + " with lines";
        s += (c + 1 < t.columns.size()) ? ", " : "\n";
    }
    return s;
}

// Write the run's artifacts under out_dir. Contents are a pure function of
// (config, seed): identical runs produce byte-identical files.
inline std::vector<std::string> emit(const RunOutput& run, const std::string& out_dir,
                                     EmitFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw ArgumentError("emit: cannot create output directory '" + out_dir + "'");
    std::vector<std::string> written;
    auto write_file = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ArgumentError("emit: cannot write '" + path + "'");
        f << content;
        written.push_back(path);
    };

    if (format == EmitFormat::Json) {
        ordered_json j = run.report;
        j["rows"] = table_to_json(run.table);
        write_file(run.table.name + ".json", j.dump(2) + "\n");
        return written;
    }
    write_file(run.table.name + ".csv", table_to_csv(run.table));
    write_file(run.table.name + ".json", run.report.dump(2) + "\n");
    if (format == EmitFormat::PlotScript)
        write_file(run.table.name + ".gp", table_to_plot_script(run.table));
    return written;
}

} // namespace ringfc

#endif // RINGFC_SWEEPS_HPP
