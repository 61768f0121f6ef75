#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "ringfc/ringfc.hpp"

using namespace ringfc;
using ringfc_tests::paper_config;
using ringfc_tests::paper_op;

TEST_CASE("sampling line shapes") {
    SECTION("delta occupies one bin with exact flux") {
        LineShape s;
        s.kind = ShapeKind::Delta;
        s.center_hz = 1.0e9;
        s.flux = 4.2e5;
        const auto grid = uniform_grid(1.0e9, 10e9, 257);
        const SampledShape out = sample(s, grid);
        int nonzero = 0;
        for (double d : out.spectrum.density)
            if (d > 0.0) ++nonzero;
        CHECK(nonzero == 1);
        CHECK(integrated_flux(out.spectrum) == Approx(4.2e5).epsilon(1e-12));
        CHECK(out.report.captured_fraction == 1.0);
    }

    SECTION("Lorentzian half-maximum points sit at +/- FWHM/2") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 2.87e9;
        s.center_hz = 0.0;
        s.flux = 1.0;
        // grid spacing chosen so +/- 1.435 GHz are exact grid points
        const auto grid = uniform_grid(0.0, 28.7e9, 20 * 2 + 1);
        const SampledShape out = sample(s, grid);
        std::size_t center = 20, half = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid[i] - 1.435e9) < 1.0) half = i;
        CHECK(out.spectrum.density[half] ==
              Approx(0.5 * out.spectrum.density[center]).epsilon(1e-12));
    }

    SECTION("flux is renormalized onto the grid and the capture reported") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 2.87e9;
        s.center_hz = 0.0;
        s.flux = 7.0e4;
        const auto narrow = uniform_grid(0.0, 12.0 * 1.12e9, 2049);
        const SampledShape out = sample(s, narrow);
        CHECK(integrated_flux(out.spectrum) == Approx(7.0e4).epsilon(1e-9));
        CHECK(out.report.captured_fraction < 1.0);
        CHECK(out.report.captured_fraction > 0.9);
        CHECK_FALSE(out.report.span_ok);  // 10 FWHM = 28.7 GHz > 26.88 GHz span
        LineShape roomy;
        roomy.kind = ShapeKind::Lorentzian;
        roomy.fwhm_lorentz_hz = 2.9e9;
        const auto wider = uniform_grid(0.0, 15e9, 513);
        CHECK(sample(roomy, wider).report.span_ok == true);
    }

    SECTION("empty support is an error") {
        LineShape s;
        s.kind = ShapeKind::Gaussian;
        s.fwhm_gauss_hz = 1e6;
        s.center_hz = 100e9;  // far outside the grid, density underflows to zero
        const auto grid = uniform_grid(0.0, 1e9, 65);
        CHECK_THROWS_AS(sample(s, grid), ArgumentError);
    }
}

TEST_CASE("Voigt evaluation against a numerical convolution") {
    const double fl = 2.0e9, fg = 2.0e9;
    const double gamma = 0.5 * fl;
    const double sigma = fg / (2.0 * std::sqrt(2.0 * std::log(2.0)));

    // Convolution oracle: V(f) = Int L(u) G(f - u) du on a fine grid.
    auto v_oracle = [&](double f) {
        const double w = 60.0 * gamma;
        const int n = 120000;
        const double du = 2.0 * w / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double u = -w + du * static_cast<double>(i);
            const double lor = gamma / (kPi * (u * u + gamma * gamma));
            const double x = (f - u) / sigma;
            const double gau = std::exp(-0.5 * x * x) / (sigma * std::sqrt(kTwoPi));
            acc += (i == 0 || i == n ? 0.5 : 1.0) * lor * gau;
        }
        return acc * du;
    };

    SECTION("pointwise accuracy") {
        for (double f : {0.0, 0.4e9, 1.0e9, 1.6375e9, 2.5e9, 4.0e9, 6.0e9}) {
            const double ours = voigt_density(f, fl, fg);
            const double ref = v_oracle(f);
            REQUIRE(std::abs(ours - ref) <= 1e-4 * ref);
        }
    }

    SECTION("width matches the standard combination formula") {
        LineShape s;
        s.kind = ShapeKind::Voigt;
        s.fwhm_lorentz_hz = fl;
        s.fwhm_gauss_hz = fg;
        s.center_hz = 0.0;
        s.flux = 1.0;
        const auto grid = uniform_grid(0.0, 40e9, 8001);
        const SampledShape out = sample(s, grid);
        CHECK(spectrum_fwhm(out.spectrum) == Approx(voigt_fwhm(fl, fg)).epsilon(1e-3));
    }
}

TEST_CASE("spectrally averaged conversion efficiency") {
    const RingParams& ring = paper_config().ring;
    const CouplingSet& c = paper_op().couplings;

    SECTION("delta input equals the point efficiency") {
        LineShape s;
        s.kind = ShapeKind::Delta;
        s.center_hz = paper_op().signal_center_hz;
        const AveragedEfficiency avg = avg_conversion_efficiency(ring, c, s);
        const FieldSolution sol = steady_state(ring, c, SignalInput{1e-6, 0.0});
        CHECK(avg.eta_ip == Approx(sol.eta_ip).epsilon(1e-12));
        CHECK(avg.eta_im == Approx(sol.eta_im).epsilon(1e-12));
    }

    SECTION("averaging is monotone in the Lorentzian width") {
        double prev = 1.0;
        for (int i = 0; i < 50; ++i) {
            LineShape s;
            s.kind = ShapeKind::Lorentzian;
            s.fwhm_lorentz_hz = 0.12e9 * static_cast<double>(i + 1);
            s.center_hz = paper_op().signal_center_hz;
            const AveragedEfficiency avg = avg_conversion_efficiency(ring, c, s);
            REQUIRE(avg.eta_ip <= prev + 1e-12);
            prev = avg.eta_ip;
        }
    }

    SECTION("narrow-band limit agrees with the delta result") {
        LineShape d;
        d.kind = ShapeKind::Delta;
        d.center_hz = paper_op().signal_center_hz;
        LineShape n;
        n.kind = ShapeKind::Lorentzian;
        n.fwhm_lorentz_hz = 1e3;
        n.center_hz = d.center_hz;
        const double eta_d = avg_conversion_efficiency(ring, c, d).eta_ip;
        const double eta_n = avg_conversion_efficiency(ring, c, n).eta_ip;
        CHECK(eta_n == Approx(eta_d).epsilon(1e-4));
    }

    SECTION("grid refinement is stable") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 2.87e9;
        s.center_hz = paper_op().signal_center_hz;
        const double half_span = kDefaultGridHalfSpanLinewidths * ring.signal.loaded_linewidth_hz();
        const auto coarse = uniform_grid(s.center_hz, half_span, kDefaultGridPoints);
        const auto fine = uniform_grid(s.center_hz, half_span, 2 * kDefaultGridPoints - 1);
        const double eta_c = avg_conversion_efficiency(ring, c, s, coarse).eta_ip;
        const double eta_f = avg_conversion_efficiency(ring, c, s, fine).eta_ip;
        CHECK(eta_f == Approx(eta_c).epsilon(1e-4));
    }
}

TEST_CASE("output spectra") {
    const RingParams& ring = paper_config().ring;
    const CouplingSet& c = paper_op().couplings;
    const double f0 = paper_op().signal_center_hz;
    const double shift = paper_op().shift_hz;

    SECTION("delta input filters to a scaled delta") {
        LineShape s;
        s.kind = ShapeKind::Delta;
        s.center_hz = f0;
        s.flux = 1e6;
        const auto grid = default_grid(ring, f0);
        const SampledShape in = sample(s, grid);
        const Spectrum blue = idler_spectrum(ring, c, in.spectrum, f0, shift, Channel::IdlerPlus);
        const FieldSolution sol = steady_state(ring, c, SignalInput{1e-6, 0.0});
        CHECK(integrated_flux(blue) == Approx(1e6 * sol.eta_ip).epsilon(1e-9));
        CHECK(blue.channel == Channel::IdlerPlus);
        // the grid is shifted up by the pump gap
        CHECK(blue.frequency_hz.front() == Approx(grid.front() + shift).epsilon(1e-12));
    }

    SECTION("a much wider converter passes the input width through") {
        RingParams wide = ring;
        wide.signal = band_from_linewidth(ring.signal.omega_hat, ring.round_trip_time, 50e9,
                                          ring.signal.q_intrinsic);
        CouplingSet cw;
        cw.omega0 = wide.signal.alpha / std::sqrt(2.0);
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 1.0e9;
        s.center_hz = f0;
        s.flux = 1.0;
        const auto grid = uniform_grid(f0, 30e9, 8193);
        const SampledShape in = sample(s, grid);
        const Spectrum blue = idler_spectrum(wide, cw, in.spectrum, f0, shift, Channel::IdlerPlus);
        CHECK(spectrum_fwhm(blue) == Approx(spectrum_fwhm(in.spectrum)).epsilon(0.05));
    }

    SECTION("remnant of a detuned input is the input") {
        LineShape s;
        s.kind = ShapeKind::Lorentzian;
        s.fwhm_lorentz_hz = 0.5e9;
        s.center_hz = f0 + 40e9;  // far off resonance
        s.flux = 1.0;
        const auto grid = uniform_grid(s.center_hz, 5e9, 1025);
        const SampledShape in = sample(s, grid);
        const Spectrum rem = remnant_spectrum(ring, c, in.spectrum, f0);
        CHECK(integrated_flux(rem) == Approx(integrated_flux(in.spectrum)).epsilon(1e-3));
    }

    SECTION("remnant of a broad resonant input is bimodal") {
        LineShape s = detail::named_lineshape("qd-2.75");
        s.center_hz = f0;
        s.flux = 1.0;
        const auto grid = default_grid(ring, f0);
        const SampledShape in = sample(s, grid);
        const Spectrum rem = remnant_spectrum(ring, c, in.spectrum, f0);
        // local minimum near resonance, below both shoulders
        auto density_at = [&](double f) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < rem.frequency_hz.size(); ++i)
                if (std::abs(rem.frequency_hz[i] - f) < std::abs(rem.frequency_hz[best] - f)) best = i;
            return rem.density[best];
        };
        CHECK(density_at(f0) < 0.6 * density_at(f0 - 2.5e9));
        CHECK(density_at(f0) < 0.6 * density_at(f0 + 2.5e9));
    }

    SECTION("filtering conserves flux") {
        LineShape s = detail::named_lineshape("qd-2.87");
        s.center_hz = f0;
        s.flux = 1e5;
        const auto grid = default_grid(ring, f0);
        const SampledShape in = sample(s, grid);
        const Spectrum blue = idler_spectrum(ring, c, in.spectrum, f0, shift, Channel::IdlerPlus);
        const Spectrum red = idler_spectrum(ring, c, in.spectrum, f0, shift, Channel::IdlerMinus);
        const Spectrum rem = remnant_spectrum(ring, c, in.spectrum, f0);

        std::vector<double> offsets(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) offsets[i] = grid[i] - f0;
        const ResponseCurve resp = response_curve(ring, c, offsets);
        Spectrum dissipated;
        dissipated.frequency_hz = grid;
        dissipated.density.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            dissipated.density[i] = resp.dissipated[i] * in.spectrum.density[i];

        const double lhs = integrated_flux(in.spectrum) - integrated_flux(rem) -
                           integrated_flux(blue) - integrated_flux(red);
        const double rhs = integrated_flux(dissipated);
        CHECK(lhs == Approx(rhs).epsilon(1e-6));
    }

    SECTION("input channel is enforced") {
        Spectrum wrong;
        wrong.frequency_hz = {0.0, 1.0, 2.0};
        wrong.density = {0.0, 1.0, 0.0};
        wrong.channel = Channel::Remnant;
        CHECK_THROWS_AS(idler_spectrum(ring, c, wrong, f0, shift, Channel::IdlerPlus), ArgumentError);
        CHECK_THROWS_AS(remnant_spectrum(ring, c, wrong, f0), ArgumentError);
    }
}

TEST_CASE("pulse decomposition into cw components") {
    SECTION("exponential wavepacket of a 1 ns emitter") {
        PulseShape p;
        p.envelope = PulseEnvelope::Exponential;
        p.duration_s = 1e-9;
        p.repetition_rate_hz = 80e6;
        const LineShape line = pulse_to_spectrum(p, 326e12, 1e6);
        REQUIRE(line.kind == ShapeKind::Tabulated);
        // resample finely to interpolate the half-maximum crossings
        const auto grid = uniform_grid(326e12, 5e9, 16385);
        const SampledShape s = sample(line, grid);
        CHECK(spectrum_fwhm(s.spectrum) == Approx(159.2e6).margin(8e6));
        CHECK(integrated_flux(s.spectrum) == Approx(1e6).epsilon(1e-9));
    }

    SECTION("Gaussian pulses satisfy the time-bandwidth product") {
        PulseShape p;
        p.envelope = PulseEnvelope::Gaussian;
        p.duration_s = 1e-9;
        p.repetition_rate_hz = 10e6;
        const LineShape line = pulse_to_spectrum(p, 326e12, 1.0);
        const auto grid = uniform_grid(326e12, 3e9, 16385);
        const SampledShape s = sample(line, grid);
        const double tbp = spectrum_fwhm(s.spectrum) * p.duration_s;
        CHECK(tbp == Approx(2.0 * std::log(2.0) / kPi).epsilon(0.01));
    }

    SECTION("doubling the duration halves the spectral width") {
        PulseShape p;
        p.envelope = PulseEnvelope::Gaussian;
        p.duration_s = 1e-9;
        p.repetition_rate_hz = 10e6;
        const auto grid = uniform_grid(0.0, 3e9, 16385);
        const double w1 = spectrum_fwhm(sample(pulse_to_spectrum(p, 0.0, 1.0), grid).spectrum);
        p.duration_s = 2e-9;
        const double w2 = spectrum_fwhm(sample(pulse_to_spectrum(p, 0.0, 1.0), grid).spectrum);
        CHECK(w1 == Approx(2.0 * w2).epsilon(0.02));
    }

    SECTION("under-resolved envelopes are rejected") {
        PulseShape p;
        p.envelope = PulseEnvelope::Gaussian;
        p.duration_s = 1e-9;
        p.repetition_rate_hz = 80e6;
        CHECK_THROWS_AS(pulse_to_spectrum(p, 0.0, 1.0, 32), ArgumentError);
    }
}
