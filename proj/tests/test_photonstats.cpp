#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "ringfc/ringfc.hpp"

using namespace ringfc;

namespace {

// Forward-simulate a coincidence histogram from a g2 model: expected counts
// are the bin-averaged model times the plateau level, Poisson-sampled. Bins
// sit at integer multiples of the bin width, so tau = 0 is a bin center.
CoincidenceHistogram synth_histogram(const G2Model& m, double plateau, int bins_per_side,
                                     double bin_s, std::mt19937_64& rng, bool poisson = true) {
    CoincidenceHistogram h;
    for (int i = -bins_per_side; i <= bins_per_side; ++i) {
        const double tau = bin_s * static_cast<double>(i);
        // average the model over the bin (16-point midpoint rule)
        double avg = 0.0;
        for (int k = 0; k < 16; ++k)
            avg += m.value(tau - 0.5 * bin_s + bin_s * (k + 0.5) / 16.0);
        avg /= 16.0;
        const double mean = plateau * avg;
        double counts = mean;
        if (poisson) {
            std::poisson_distribution<long> pd(mean);
            counts = static_cast<double>(pd(rng));
        }
        h.tau_s.push_back(tau);
        h.counts.push_back(counts);
    }
    return h;
}

// Bin-averaged model value at zero delay; the finite bin makes it nonzero
// even for a perfectly antibunched source.
double binned_zero(const G2Model& m, double bin_s) {
    double avg = 0.0;
    for (int k = 0; k < 16; ++k)
        avg += m.value(-0.5 * bin_s + bin_s * (k + 0.5) / 16.0);
    return avg / 16.0;
}

} // namespace

TEST_CASE("g2 model evaluation") {
    SECTION("Poissonian plateau at large delay") {
        const G2Model m = G2Model::make(-1.2, 1.0e9, 0.2e9);
        CHECK(g2_eval(m, 1e-6) == Approx(1.0).epsilon(1e-12));
        CHECK(g2_eval(m, -1e-6) == Approx(1.0).epsilon(1e-12));
    }

    SECTION("single-exponential limit is purely antibunched") {
        const G2Model m = G2Model::make(-1.0, 1.0e9, 2.0e9);
        CHECK(g2_eval(m, 0.0) == Approx(0.0).margin(1e-15));
        CHECK(m.a2 == 0.0);
    }

    SECTION("construction enforces the constraint and positivity") {
        CHECK_THROWS_AS(G2Model::make(-1.2, -1.0, 1.0), ValidationError);
        // strong bunching with a slow antibunching rate dips negative
        CHECK_THROWS_AS(G2Model::make(-5.0, 0.05e9, 5.0e9), ValidationError);
    }

    SECTION("even in tau") {
        const G2Model m = G2Model::make(-1.3, 2.0e9, 0.3e9);
        for (double tau : {0.1e-9, 0.7e-9, 3e-9})
            CHECK(g2_eval(m, tau) == g2_eval(m, -tau));
    }
}

TEST_CASE("fitting coincidence histograms") {
    SECTION("synthetic cw histogram round-trips within 2 sigma") {
        const G2Model truth = G2Model::make(-1.2, 1.0 / 0.8e-9, 1.0 / 6e-9);
        std::mt19937_64 rng(42);
        const CoincidenceHistogram h = synth_histogram(truth, 2.0e5, 313, 128e-12, rng);
        FitOptions opt;
        opt.seed = 7;
        const G2FitReport rep = fit_g2(h, opt);
        const double expected_zero = binned_zero(truth, 128e-12);
        CHECK(std::abs(rep.g2_zero_datum - expected_zero) <= 2.0 * rep.g2_zero_sigma +
                                                                 2.0 / std::sqrt(2.0e5));
        CHECK(rep.model.a1 < -0.5);
        CHECK_FALSE(rep.poissonian_warning);
        CHECK(rep.model.a1 + rep.model.a2 == Approx(-1.0).epsilon(1e-12));
    }

    SECTION("reference antibunching level reads back as the zero-bin datum") {
        // Plateau of 1.11e5 counts makes the plateau fluctuation level,
        // propagated to the normalized histogram, about 0.003.
        const G2Model shape = G2Model::make(-1.15, 1.0 / 0.9e-9, 1.0 / 8e-9);
        std::mt19937_64 rng(123);
        CoincidenceHistogram h = synth_histogram(shape, 1.11e5, 352, 128e-12, rng);
        // pin the zero-delay bin to the measured antibunching level
        std::size_t i0 = 0;
        for (std::size_t i = 1; i < h.tau_s.size(); ++i)
            if (std::abs(h.tau_s[i]) < std::abs(h.tau_s[i0])) i0 = i;
        const G2FitReport probe = fit_g2(h);
        h.counts[i0] = std::round(0.080 * probe.plateau_level);
        const G2FitReport rep = fit_g2(h);
        CHECK(rep.g2_zero_datum == Approx(0.080).margin(0.002));
        CHECK(rep.g2_zero_sigma == Approx(0.003).margin(0.0015));
    }

    SECTION("flat histogram reports Poissonian statistics with a warning") {
        CoincidenceHistogram h;
        std::mt19937_64 rng(5);
        std::poisson_distribution<long> pd(2e5);
        for (int i = 0; i < 401; ++i) {
            h.tau_s.push_back((-200.0 + i) * 128e-12);
            h.counts.push_back(static_cast<double>(pd(rng)));
        }
        const G2FitReport rep = fit_g2(h);
        CHECK(rep.poissonian_warning);
        CHECK(rep.g2_zero_datum == Approx(1.0).margin(0.05));
    }

    SECTION("too few bins are rejected") {
        CoincidenceHistogram h;
        for (int i = 0; i < 20; ++i) {
            h.tau_s.push_back(i * 128e-12);
            h.counts.push_back(100.0);
        }
        CHECK_THROWS_AS(fit_g2(h), ArgumentError);
    }
}

TEST_CASE("pulsed peak-area ratio") {
    // Side peaks every 12.5 ns, suppressed center peak, negligible dark floor.
    CoincidenceHistogram h;
    const double bin = 128e-12;
    const int n = 1601;
    for (int i = 0; i < n; ++i) {
        const double tau = (i - n / 2) * bin;
        double c = 0.0;
        for (int k = -4; k <= 4; ++k) {
            const double d = tau - k * 12.5e-9;
            const double amp = k == 0 ? 30.0 : 300.0;
            c += amp * std::exp(-std::abs(d) / 0.4e-9);
        }
        h.tau_s.push_back(tau);
        h.counts.push_back(std::round(c));
    }
    const double r = pulsed_g2_peak_ratio(h, 4e-9, 12.5e-9);
    CHECK(r == Approx(0.1).epsilon(0.1));
    CHECK_THROWS_AS(pulsed_g2_peak_ratio(h, 4e-9, 1e-6), ArgumentError);
}

TEST_CASE("noise mixing") {
    SECTION("identity and full-background limits") {
        CHECK(mix_with_noise(0.08, 1.0) == Approx(0.08).epsilon(1e-12));
        CHECK(mix_with_noise(0.08, 0.0) == 1.0);
    }

    SECTION("measured degradation inverts to the signal fraction") {
        const double rho = solve_signal_fraction(0.080, 0.290);
        CHECK(rho == Approx(0.878).margin(0.005));
        CHECK(mix_with_noise(0.080, rho) == Approx(0.290).epsilon(1e-12));
    }

    SECTION("mixing stays between source and Poissonian levels, monotonically") {
        for (double g2 : {0.0, 0.08, 0.45, 1.6}) {
            double prev = mix_with_noise(g2, 0.0);
            CHECK(prev == 1.0);
            for (int i = 1; i <= 50; ++i) {
                const double rho = i / 50.0;
                const double mixed = mix_with_noise(g2, rho);
                REQUIRE(mixed >= std::min(g2, 1.0) - 1e-12);
                REQUIRE(mixed <= std::max(g2, 1.0) + 1e-12);
                if (g2 < 1.0)
                    REQUIRE(mixed <= prev + 1e-12);
                else
                    REQUIRE(mixed >= prev - 1e-12);
                prev = mixed;
            }
        }
    }

    SECTION("antibunching survives while the signal fraction exceeds the threshold") {
        // for g2_src = 0.08, g2_meas < 0.5 iff rho > sqrt(0.5/0.92) ~= 0.7372
        CHECK(mix_with_noise(0.08, 0.7380) < 0.5);
        CHECK(mix_with_noise(0.08, 0.7365) > 0.5);
    }

    SECTION("infeasible mixes are rejected") {
        CHECK_THROWS_AS(solve_signal_fraction(0.08, 0.05), ArgumentError);
        CHECK_THROWS_AS(solve_signal_fraction(0.08, 1.2), ArgumentError);
        CHECK_THROWS_AS(mix_with_noise(0.08, 1.5), ArgumentError);
    }
}

TEST_CASE("converter noise budget") {
    SECTION("reference numbers") {
        const NoiseBudget b = noise_budget(3.2e-15, 916.17e-9, 80e6, 2e-9, 0.01, 0.10);
        CHECK(b.noise_flux == Approx(1.5e4).epsilon(0.05));
        CHECK(b.noise_photons_per_pulse == Approx(3e-5).epsilon(0.05));
        CHECK(b.snr > 30.0);
    }

    SECTION("dimensional consistency") {
        const NoiseBudget b = noise_budget(3.2e-15, 916.17e-9, 80e6, 2e-9, 0.01, 0.10);
        CHECK(b.noise_flux * photon_energy(b.wavelength_m) == Approx(3.2e-15).epsilon(1e-9));
    }

    SECTION("invalid inputs") {
        CHECK_THROWS_AS(noise_budget(3.2e-15, 0.0, 80e6, 2e-9, 0.01, 0.1), ArgumentError);
        CHECK_THROWS_AS(noise_budget(0.0, 916e-9, 80e6, 2e-9, 0.01, 0.1), ArgumentError);
    }
}

TEST_CASE("spectral line fitting") {
    SECTION("noiseless Lorentzian is recovered exactly") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 1.62e9;
        s.center_hz = 5e9;
        s.flux = 1.0;
        const auto grid = uniform_grid(5e9, 20e9, 1401);
        const SampledShape in = sample(s, grid);
        const LinewidthFit fit = fit_linewidth(in.spectrum, LineModel::Lorentzian);
        CHECK(fit.fwhm_hz == Approx(1.62e9).epsilon(1e-6));
        CHECK(fit.center_hz == Approx(5e9).margin(1e3));
    }

    SECTION("noisy Lorentzian is recovered within two sigma") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 1.62e9;
        s.center_hz = 0.0;
        s.flux = 1.0;
        const auto grid = uniform_grid(0.0, 15e9, 601);
        SampledShape in = sample(s, grid);
        std::mt19937_64 rng(9);
        std::normal_distribution<double> noise(0.0, 0.02 * in.spectrum.density[300]);
        for (double& d : in.spectrum.density) d = std::max(0.0, d + noise(rng));
        const LinewidthFit fit = fit_linewidth(in.spectrum, LineModel::Lorentzian);
        CHECK(std::abs(fit.fwhm_hz - 1.62e9) <= 2.0 * fit.fwhm_sigma_hz);
    }

    SECTION("Voigt round trip at the measured source width") {
        LineShape s = detail::named_lineshape("qd-2.75");
        s.center_hz = 0.0;
        s.flux = 1.0;
        const auto grid = uniform_grid(0.0, 30e9, 2001);
        const SampledShape in = sample(s, grid);
        const LinewidthFit fit = fit_linewidth(in.spectrum, LineModel::Voigt);
        CHECK(fit.fwhm_hz == Approx(2.75e9).epsilon(2e-3));
        CHECK(fit.fwhm_lorentz_hz == Approx(s.fwhm_lorentz_hz).epsilon(0.01));
        CHECK(fit.fwhm_gauss_hz == Approx(s.fwhm_gauss_hz).epsilon(0.01));
    }

    SECTION("under-resolved peaks are rejected") {
        Spectrum s;
        s.frequency_hz = {0.0, 1e9, 2e9, 3e9};
        s.density = {0.0, 1.0, 0.0, 0.0};
        CHECK_THROWS_AS(fit_linewidth(s, LineModel::Lorentzian), ArgumentError);
    }
}

TEST_CASE("CSV ingestion") {
    SECTION("histogram format") {
        std::istringstream in("tau_s,counts\n-1.28e-10,100\n0,8\n1.28e-10,100\n");
        const CoincidenceHistogram h = read_histogram_csv(in);
        REQUIRE(h.tau_s.size() == 3);
        CHECK(h.counts[1] == 8.0);
        CHECK(h.bin_width() == Approx(1.28e-10));
    }

    SECTION("visibility format") {
        std::istringstream in("delay_s,visibility\n0,1.0\n5.1e-11,0.6\n1.02e-10,0.37\n");
        const VisibilityData v = read_visibility_csv(in);
        REQUIRE(v.delay_s.size() == 3);
        CHECK(v.visibility[2] == Approx(0.37));
    }

    SECTION("malformed rows carry line numbers") {
        std::istringstream in("tau_s,counts\n0 100\n");
        CHECK_THROWS_WITH(read_histogram_csv(in), Catch::Contains("line 2"));
    }
}

TEST_CASE("coherence-time fitting") {
    SECTION("noiseless exponential recovery and the width cross-check") {
        const double tau_c = 102e-12;
        std::vector<double> delay, vis;
        for (int i = 0; i < 24; ++i) {
            delay.push_back(20e-12 * i);
            vis.push_back(std::exp(-delay.back() / tau_c));
        }
        const CoherenceFit fit = fit_coherence(delay, vis);
        CHECK(fit.tau_c_s == Approx(tau_c).epsilon(1e-9));
        CHECK(fit.equivalent_fwhm_hz == Approx(3.12e9).epsilon(2e-3));
    }

    SECTION("doubling the coherence time halves the width") {
        std::vector<double> delay, vis1, vis2;
        for (int i = 0; i < 24; ++i) {
            delay.push_back(20e-12 * i);
            vis1.push_back(std::exp(-delay.back() / 102e-12));
            vis2.push_back(std::exp(-delay.back() / 204e-12));
        }
        const CoherenceFit f1 = fit_coherence(delay, vis1);
        const CoherenceFit f2 = fit_coherence(delay, vis2);
        CHECK(f1.equivalent_fwhm_hz == Approx(2.0 * f2.equivalent_fwhm_hz).epsilon(1e-6));
    }

    SECTION("non-decaying data is a fit failure") {
        std::vector<double> delay{0.0, 1e-12, 2e-12, 3e-12, 4e-12};
        std::vector<double> vis{1.0, 1.0, 1.01, 1.0, 1.02};
        CHECK_THROWS_AS(fit_coherence(delay, vis), FitError);
    }
}

TEST_CASE("fit round-trip coverage over repeated noise realizations") {
    // 100 linewidth fits + 100 g2 fits; at least 95 % must recover the truth
    // within two reported sigma.
    int pass = 0, total = 0;
    std::mt19937_64 rng(0xc0ffee);

    LineShape s;
    s.kind = ShapeKind::Lorentzian;
    s.fwhm_lorentz_hz = 1.62e9;
    s.center_hz = 0.0;
    s.flux = 1.0;
    const auto grid = uniform_grid(0.0, 4.86e9, 401);
    const SampledShape clean = sample(s, grid);
    for (int trial = 0; trial < 100; ++trial) {
        Spectrum noisy = clean.spectrum;
        std::normal_distribution<double> noise(0.0, 0.005 * clean.spectrum.density[200]);
        for (double& d : noisy.density) d = std::max(0.0, d + noise(rng));
        FitOptions opt;
        opt.restarts = 2;
        opt.seed = static_cast<std::uint64_t>(trial + 1);
        try {
            const LinewidthFit fit = fit_linewidth(noisy, LineModel::Lorentzian, opt);
            ++total;
            if (std::abs(fit.fwhm_hz - 1.62e9) <= 2.0 * fit.fwhm_sigma_hz) ++pass;
        } catch (const FitError&) {
            ++total;
        }
    }

    const G2Model truth = G2Model::make(-1.2, 1.0 / 0.8e-9, 1.0 / 6e-9);
    for (int trial = 0; trial < 100; ++trial) {
        const CoincidenceHistogram h = synth_histogram(truth, 1.0e5, 313, 128e-12, rng);
        FitOptions opt;
        opt.restarts = 2;
        opt.seed = static_cast<std::uint64_t>(trial + 1);
        try {
            const G2FitReport rep = fit_g2(h, opt);
            ++total;
            const double expected = binned_zero(truth, 128e-12);
            // zero-bin datum is itself Poisson-fluctuating around the binned
            // truth; allow its own counting sigma on top of the reported one
            const double counting = std::sqrt(std::max(expected * 1.0e5, 1.0)) / 1.0e5;
            if (std::abs(rep.g2_zero_datum - expected) <=
                2.0 * std::sqrt(rep.g2_zero_sigma * rep.g2_zero_sigma + counting * counting))
                ++pass;
        } catch (const FitError&) {
            ++total;
        }
    }

    INFO("recovered " << pass << " of " << total);
    CHECK(total == 200);
    CHECK(pass >= 190);
}
