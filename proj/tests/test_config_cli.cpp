#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "ringfc/ringfc.hpp"

using namespace ringfc;
using ringfc_tests::paper_config;

namespace {

std::string preset_with(const std::string& from, const std::string& to) {
    std::string text = paper_device_preset_text();
    const std::size_t pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    return text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / ("ringfc_test_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("quantity parsing") {
    CHECK(parse_quantity("10 mW").value == Approx(0.01));
    CHECK(parse_quantity("10 mW").kind == UnitKind::Power);
    CHECK(parse_quantity("573.2 GHz").value == Approx(5.732e11));
    CHECK(parse_quantity("13.67 pm").value == Approx(13.67e-12));
    CHECK(parse_quantity("13.67 pm").kind == UnitKind::Length);
    CHECK(parse_quantity("2 ns").value == Approx(2e-9));
    CHECK(parse_quantity("1.6e6").kind == UnitKind::None);
    CHECK(parse_quantity("-3.5").value == Approx(-3.5));
    CHECK_THROWS_AS(parse_quantity("fast"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("3 furlongs"), ConfigError);
}

TEST_CASE("bundled reference preset") {
    const RunConfig& rc = paper_config();
    CHECK(rc.ring.radius == Approx(40e-6));
    CHECK(rc.ring_width_m == Approx(1450e-9));
    CHECK(rc.ring.signal.loaded_linewidth_hz() == Approx(1.12e9).epsilon(1e-9));
    CHECK(rc.ring.signal.q_intrinsic == Approx(1.6e6));
    CHECK(rc.ring.signal.intrinsic_linewidth_hz() == Approx(0.2e9).margin(0.01e9));
    CHECK(rc.ring.signal.coupling_linewidth_hz() == Approx(0.9e9).margin(0.03e9));
    CHECK(rc.thermal.rate_m_per_k == Approx(13.67e-12));
    CHECK(rc.pump_power_1 + rc.pump_power_2 == Approx(20e-3));
    CHECK(rc.separation_modes == 1);
    CHECK(rc.hash.size() == 16);
    // Q relation holds to declared precision
    CHECK(1.0 / rc.ring.signal.q_loaded ==
          Approx(1.0 / rc.ring.signal.q_intrinsic + 1.0 / rc.ring.signal.q_coupling).epsilon(1e-12));
}

TEST_CASE("config parse errors carry line numbers") {
    SECTION("empty file") {
        CHECK_THROWS_WITH(load_config_text(""), Catch::Contains("line 1"));
        CHECK_THROWS_WITH(load_config_text("\n\n# only comments\n"), Catch::Contains("line 1"));
    }

    SECTION("key outside a section") {
        CHECK_THROWS_WITH(load_config_text("radius = 40 um\n"), Catch::Contains("line 1"));
    }

    SECTION("missing equals sign") {
        CHECK_THROWS_WITH(load_config_text("[ring]\nradius 40 um\n"), Catch::Contains("line 2"));
    }

    SECTION("duplicate key") {
        CHECK_THROWS_WITH(load_config_text("[ring]\nradius = 1 um\nradius = 2 um\n"),
                          Catch::Contains("line 3"));
    }

    SECTION("unknown section and key are rejected in strict mode") {
        CHECK_THROWS_WITH(load_config_text(preset_with("[ring]", "[rings]")),
                          Catch::Contains("unknown section"));
        CHECK_THROWS_WITH(load_config_text(preset_with("radius = 40 um", "radios = 40 um")),
                          Catch::Contains("unknown key"));
    }

    SECTION("unknown preset name") {
        CHECK_THROWS_AS(load_config("no-such-preset"), ConfigError);
    }
}

TEST_CASE("config validation names the violated invariant") {
    SECTION("negative intrinsic Q") {
        CHECK_THROWS_WITH(load_config_text(preset_with("intrinsic_q = 1.6e6", "intrinsic_q = -1")),
                          Catch::Contains("RingParams"));
    }

    SECTION("loaded linewidth below the intrinsic limit") {
        CHECK_THROWS_AS(
            load_config_text(preset_with("loaded_linewidth = 1.12 GHz", "loaded_linewidth = 0.1 GHz")),
            ValidationError);
    }

    SECTION("physical parameters without published values must be explicit") {
        CHECK_THROWS_AS(load_config_text(preset_with("gamma_signal = 3.4\n", "")), ConfigError);
        CHECK_THROWS_AS(load_config_text(preset_with("power = 3.2 fW\n", "")), ConfigError);
    }

    SECTION("empty sweep") {
        CHECK_THROWS_AS(load_config_text(preset_with("to = 6 GHz", "to = 0 GHz")), ValidationError);
    }

    SECTION("wrong unit kind") {
        CHECK_THROWS_WITH(load_config_text(preset_with("power_1 = 10 mW", "power_1 = 10 GHz")),
                          Catch::Contains("unit"));
    }
}

TEST_CASE("emitted files") {
    RunConfig rc = load_config_text(preset_with("points = 100", "points = 12"));

    SECTION("fig4c CSV carries the documented header and is deterministic") {
        const RunOutput a = run_fig4c(rc, 1);
        const RunOutput b = run_fig4c(rc, 4);
        const std::string csv_a = table_to_csv(a.table);
        const std::string csv_b = table_to_csv(b.table);
        CHECK(csv_a.rfind("fwhm_hz,efficiency_blue,efficiency_red\n", 0) == 0);
        CHECK(csv_a == csv_b);  // worker count cannot affect ordering

        TempDir d1("emit_a"), d2("emit_b");
        emit(a, d1.path.string(), EmitFormat::Csv);
        emit(b, d2.path.string(), EmitFormat::Csv);
        CHECK(slurp((d1.path / "fig4c.csv").string()) == slurp((d2.path / "fig4c.csv").string()));
        CHECK(slurp((d1.path / "fig4c.json").string()) == slurp((d2.path / "fig4c.json").string()));
    }

    SECTION("reports embed the config hash") {
        const RunOutput out = run_budget(rc);
        CHECK(out.report.at("config_hash").get<std::string>() == rc.hash);
        CHECK(rc.hash == config_hash(rc.raw_text));
    }

    SECTION("plot-script format adds a gnuplot program referencing the CSV") {
        const RunOutput out = run_fig5c(rc);
        TempDir d("plot");
        const auto files = emit(out, d.path.string(), EmitFormat::PlotScript);
        CHECK(files.size() == 3);
        const std::string script = slurp((d.path / "fig5c.gp").string());
        CHECK(script.find("fig5c.csv") != std::string::npos);
    }

    SECTION("json format carries rows") {
        const RunOutput out = run_noise(rc);
        TempDir d("json");
        emit(out, d.path.string(), EmitFormat::Json);
        const std::string text = slurp((d.path / "noise.json").string());
        CHECK(text.find("\"rows\"") != std::string::npos);
        CHECK(text.find("config_hash") != std::string::npos);
    }

    SECTION("spectrum export uses the documented column names") {
        const RunOutput out = run_fig4ef(rc);
        const std::string csv = table_to_csv(out.table);
        CHECK(csv.rfind("frequency_hz,density_per_hz,channel\n", 0) == 0);
        CHECK(csv.find(",idler+\n") != std::string::npos);
        CHECK(csv.find(",remnant\n") != std::string::npos);
    }
}

TEST_CASE("budget arithmetic") {
    const RunConfig& rc = paper_config();

    SECTION("reference fractions and linewidth split") {
        const EfficiencyBudget b = budget(rc.ring, rc.budget);
        CHECK(b.extraction == Approx(0.82).margin(0.005));
        CHECK(b.total_converted == Approx(0.73).epsilon(1e-12));
        CHECK(b.ceiling == Approx(0.89).margin(0.02));
    }

    SECTION("single-idler degenerate budget") {
        BudgetFractions f;
        f.blue = 0.31;
        const EfficiencyBudget b = budget(rc.ring, f);
        CHECK(b.ceiling == Approx(0.31 / b.extraction).epsilon(1e-12));
    }

    SECTION("the ceiling is capped at unity") {
        BudgetFractions f;
        f.blue = 0.9;
        f.red = 0.05;
        f.higher_order = 0.05;
        CHECK(budget(rc.ring, f).ceiling == 1.0);
    }
}

TEST_CASE("figure runners produce sane tables") {
    RunConfig rc = load_config_text(preset_with("points = 100", "points = 16"));

    SECTION("fig4b columns and broadening") {
        const RunOutput out = run_fig4b(rc);
        CHECK(out.table.columns ==
              std::vector<std::string>{"offset_hz", "transmission_linear", "transmission_pumped"});
        CHECK(out.report.at("pumped_dip_fwhm_hz").get<double>() >
              out.report.at("linear_dip_fwhm_hz").get<double>());
    }

    SECTION("fig5a sweeps the full band smoothly") {
        const RunOutput out = run_fig5a(rc, 2);
        CHECK(out.table.rows.size() == 16);
        CHECK(out.table.rows.front()[0] == Approx(840.0));
        CHECK(out.table.rows.back()[0] == Approx(980.0));
        for (const auto& row : out.table.rows) {
            REQUIRE(row[1] >= 0.0);
            REQUIRE(row[1] <= 0.5);
        }
        CHECK(out.report.at("mean_efficiency_blue").get<double>() > 0.2);
    }

    SECTION("fig5b mu = 1 equals the narrow-band fig4c point") {
        const RunOutput f5b = run_fig5b(rc);
        const RunOutput f4c = run_fig4c(rc);
        CHECK(f5b.table.rows.front()[3] ==
              Approx(f4c.report.at("narrowband_blue").get<double>()).epsilon(1e-6));
        // eight-FSR shift lands at the demonstrated range point
        const auto& mu8 = f5b.table.rows[7];
        CHECK(mu8[0] == 8.0);
        CHECK(mu8[2] == Approx(12.8).margin(0.15));
    }

    SECTION("figS2 grows fast, then saturates") {
        RunConfig small = load_config_text(preset_with("points = 100", "points = 24"));
        const RunOutput out = run_figS2(small, 2);
        // marginal gain per GHz for the 1 GHz input drops below 20 % of the
        // peak slope once the loaded linewidth exceeds 3x the input width
        double peak_slope = 0.0;
        std::vector<std::pair<double, double>> slopes;  // (midpoint, slope)
        for (std::size_t i = 1; i < out.table.rows.size(); ++i) {
            const double dx = (out.table.rows[i][0] - out.table.rows[i - 1][0]) / 1e9;
            const double dy = out.table.rows[i][1] - out.table.rows[i - 1][1];
            const double mid = 0.5 * (out.table.rows[i][0] + out.table.rows[i - 1][0]);
            slopes.emplace_back(mid, dy / dx);
            peak_slope = std::max(peak_slope, dy / dx);
        }
        REQUIRE(peak_slope > 0.0);
        for (const auto& [mid, slope] : slopes)
            if (mid > 3.0e9) REQUIRE(std::abs(slope) < 0.2 * peak_slope);
    }

    SECTION("fig5c carries the tuning rate") {
        const RunOutput out = run_fig5c(rc);
        CHECK(out.report.at("rate_pm_per_c").get<double>() == Approx(13.67));
        CHECK(out.report.at("shift_at_60c_pm").get<double>() == Approx(820.2).epsilon(1e-9));
    }

    SECTION("solve reports the calibrated operating point") {
        const RunOutput out = run_solve(rc);
        CHECK(out.report.at("eta_blue").get<double>() == Approx(0.31).epsilon(1e-4));
        CHECK(out.report.at("balance_defect").get<double>() < 1e-9);
    }
}
