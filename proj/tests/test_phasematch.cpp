#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "entsim/constants.hpp"
#include "entsim/errors.hpp"
#include "entsim/materials.hpp"
#include "entsim/phasematch.hpp"
#include "entsim/quadrature.hpp"
#include "test_util.hpp"

using namespace entsim;
using materials::Axis;
namespace pm = entsim::phasematch;

namespace {

materials::MaterialRegistry bundled() {
    return materials::load_registry(testutil::data_file("materials.json"));
}

materials::SellmeierModel constant_model(const std::string& name, Axis axis, double n0) {
    materials::SellmeierModel m;
    m.name = name;
    m.axis = axis;
    m.form = materials::SellmeierForm::Constant;
    m.coefficients = {n0};
    m.wavelength_range_um = {0.1, 10.0};
    m.temperature_range_c = {-50.0, 250.0};
    m.normal_dispersion_range_um = m.wavelength_range_um;
    return m;
}

}  // namespace

TEST_CASE("idler_wavelength") {
    SUBCASE("532/810 gives the 1550.08 nm idler") {
        const double li = pm::idler_wavelength(532.0, 810.0);
        CHECK(li == doctest::Approx(532.0 * 810.0 / (810.0 - 532.0)).epsilon(1e-14));
        CHECK(li == doctest::Approx(1550.08).epsilon(0.01 / 1550.0));
    }
    SUBCASE("degenerate symmetry") {
        CHECK(pm::idler_wavelength(532.0, 1064.0) == doctest::Approx(1064.0));
    }
    SUBCASE("no downconversion above the pump energy") {
        CHECK_THROWS_AS(pm::idler_wavelength(532.0, 500.0), DomainError);
        CHECK_THROWS_AS(pm::idler_wavelength(532.0, 532.0), DomainError);
    }
    SUBCASE("energy conservation is an involution") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> ls(600.0, 1050.0);
        for (int i = 0; i < 50; ++i) {
            const double s = ls(rng);
            const double back = pm::idler_wavelength(532.0, pm::idler_wavelength(532.0, s));
            CHECK(back == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("QpmConfig validation") {
    CHECK_THROWS_AS(pm::QpmConfig::make(532.0, 500.0, 9.6, 4.5, 25.0, "KTP"), DomainError);
    pm::QpmConfig cfg = pm::QpmConfig::make(532.0, 810.0, 9.6, 4.5, 25.0, "KTP");
    cfg.idler_nm = 1500.0;  // break energy conservation
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = pm::QpmConfig::make(532.0, 810.0, 9.6, 4.5, 25.0, "KTP");
    cfg.poling_period_um = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("qpm mismatch and period solving for PPKTP") {
    const auto reg = bundled();

    SUBCASE("solved period nulls the mismatch (root definition)") {
        const double period = pm::solve_poling_period(reg, 810.0, 532.0, 111.0, "KTP");
        auto cfg = pm::QpmConfig::make(532.0, 810.0, period, 4.5, 111.0, "KTP");
        CHECK(std::abs(pm::qpm_mismatch(reg, cfg)) < 1.0);
    }

    SUBCASE("solved period at the operating temperature") {
        const double period = pm::solve_poling_period(reg, 810.0, 532.0, 111.0, "KTP");
        CHECK(period == doctest::Approx(9.6).epsilon(0.5 / 9.6));     // quoted grating
        CHECK(period == doctest::Approx(9.5318).epsilon(2e-4));       // this coefficient set
    }

    SUBCASE("the 9.6 um grating phase-matches within the oven range") {
        // Published coefficient sets disagree on the exact pairing of grating
        // period and temperature by a few degrees; solve the matching
        // temperature for the quoted period and require it near the quoted
        // operating point, then check the mismatch criterion there.
        auto mismatch_at_t = [&](double t) {
            auto cfg = pm::QpmConfig::make(532.0, 810.0, 9.6, 4.5, t, "KTP");
            return pm::qpm_mismatch(reg, cfg);
        };
        double lo = 15.0, hi = 155.0;
        REQUIRE(mismatch_at_t(lo) * mismatch_at_t(hi) < 0.0);
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (mismatch_at_t(mid) * mismatch_at_t(lo) > 0.0 ? lo : hi) = mid;
        }
        const double t_match = 0.5 * (lo + hi);
        CHECK(t_match > 40.0);
        CHECK(t_match < 130.0);
        CHECK(std::abs(mismatch_at_t(t_match)) * 0.5 * 4.5e-3 < 0.5);  // |dk| L / 2 in rad
    }

    SUBCASE("infinite period reduces to the bulk mismatch") {
        auto cfg = pm::QpmConfig::make(532.0, 810.0, 9.6, 4.5, 111.0, "KTP");
        cfg.poling_period_um = std::numeric_limits<double>::infinity();
        CHECK(pm::qpm_mismatch(reg, cfg) == doctest::Approx(pm::bulk_mismatch(reg, cfg)));
    }
}

TEST_CASE("period solver on synthetic constant-index materials") {
    // pump polarized along Z (n = 1.8), signal/idler along X (n = 1.7)
    const auto reg = materials::MaterialRegistry::from_models(
        {constant_model("synthetic", Axis::Z, 1.8), constant_model("synthetic", Axis::X, 1.7)});

    SUBCASE("closed-form grating period") {
        const double li_um = pm::idler_wavelength(532.0, 810.0) * 1e-3;
        const double expected_um = 1.0 / (1.8 / 0.532 - 1.7 / 0.810 - 1.7 / li_um);
        const double solved = pm::solve_poling_period(reg, 810.0, 532.0, 25.0, "synthetic",
                                                      Axis::Z, Axis::X, Axis::X);
        CHECK(solved == doctest::Approx(expected_um).epsilon(1e-9));
    }

    SUBCASE("bulk-matched degenerate case reports the no-grating sentinel") {
        // equal indices, degenerate wavelengths: k_s + k_i - k_p = 0 exactly
        const double solved = pm::solve_poling_period(reg, 1064.0, 532.0, 25.0, "synthetic",
                                                      Axis::Z, Axis::Z, Axis::Z);
        CHECK(std::isinf(solved));
    }

    SUBCASE("positive bulk mismatch cannot be compensated") {
        // swap indices so k_p < k_s + k_i
        const auto swapped = materials::MaterialRegistry::from_models(
            {constant_model("anomalous", Axis::Z, 1.7),
             constant_model("anomalous", Axis::X, 1.8)});
        CHECK_THROWS_AS(pm::solve_poling_period(swapped, 810.0, 532.0, 25.0, "anomalous",
                                                Axis::Z, Axis::X, Axis::X),
                        SolverError);
    }
}

TEST_CASE("round trip: solve then mismatch is zero for every bundled material") {
    const auto reg = bundled();
    struct Case { const char* material; double temp; };
    for (const auto& c : {Case{"KTP", 25.0}, Case{"KTP", 111.0}, Case{"KTP", 140.0},
                          Case{"LN", 25.0}, Case{"MgOLN", 25.0}}) {
        const double period = pm::solve_poling_period(reg, 810.0, 532.0, c.temp, c.material);
        auto cfg = pm::QpmConfig::make(532.0, 810.0, period, 4.5, c.temp, c.material);
        CHECK(std::abs(pm::qpm_mismatch(reg, cfg)) < 0.1);
    }
}

TEST_CASE("phase-matching spectrum") {
    const auto reg = bundled();
    const double period = pm::solve_poling_period(reg, 810.0, 532.0, 111.0, "KTP");
    const auto cfg = pm::QpmConfig::make(532.0, 810.0, period, 4.5, 111.0, "KTP");

    std::vector<double> grid;
    for (double l = 795.0; l <= 825.0; l += 0.01) grid.push_back(l);
    const auto spectrum = pm::pm_spectrum(reg, cfg, grid);
    REQUIRE(spectrum.size() == grid.size());

    SUBCASE("unit peak at the phase-matched wavelength") {
        double peak = 0.0, peak_l = 0.0;
        for (const auto& p : spectrum) {
            if (p.intensity > peak) { peak = p.intensity; peak_l = p.signal_nm; }
            CHECK(p.intensity >= 0.0);
            CHECK(p.intensity <= 1.0);
        }
        CHECK(peak == doctest::Approx(1.0));
        CHECK(peak_l == doctest::Approx(810.0).epsilon(1e-4));
    }

    SUBCASE("first zero sits where L dk / 2 = pi") {
        // locate the wavelength where the sinc argument reaches pi, above the peak
        const double half_length = 0.5 * cfg.length_mm * 1e-3;
        double lo = 810.0, hi = 825.0;
        auto arg = [&](double ls) {
            auto point = cfg;
            point.signal_nm = ls;
            point.idler_nm = pm::idler_wavelength(cfg.pump_nm, ls);
            return std::abs(pm::qpm_mismatch(reg, point)) * half_length - constants::pi;
        };
        REQUIRE(arg(lo) < 0.0);
        REQUIRE(arg(hi) > 0.0);
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (arg(mid) < 0.0 ? lo : hi) = mid;
        }
        const double zero_l = 0.5 * (lo + hi);
        auto point = cfg;
        point.signal_nm = zero_l;
        point.idler_nm = pm::idler_wavelength(cfg.pump_nm, zero_l);
        const double dk = pm::qpm_mismatch(reg, point);
        const double s = quad::sinc(half_length * dk);
        CHECK(s * s < 1e-8);
    }

    SUBCASE("FWHM matches a dense-grid scan to 1%") {
        // oracle: much denser grid, direct threshold crossing
        std::vector<double> dense;
        for (double l = 805.0; l <= 815.0; l += 0.0005) dense.push_back(l);
        const auto fine = pm::pm_spectrum(reg, cfg, dense);
        auto fwhm = [](const std::vector<pm::SpectrumPoint>& spec) {
            double first = 0.0, last = 0.0;
            for (std::size_t i = 1; i < spec.size(); ++i) {
                if (spec[i - 1].intensity < 0.5 && spec[i].intensity >= 0.5 && first == 0.0) {
                    first = spec[i].signal_nm;
                }
                if (spec[i - 1].intensity >= 0.5 && spec[i].intensity < 0.5) {
                    last = spec[i].signal_nm;
                }
            }
            return last - first;
        };
        const double width_coarse = fwhm(spectrum);
        const double width_dense = fwhm(fine);
        CHECK(width_coarse == doctest::Approx(width_dense).epsilon(0.01));
        CHECK(width_dense > 1.0);   // a few nm for a 4.5 mm crystal
        CHECK(width_dense < 5.0);
    }

    SUBCASE("empty grid is a domain error") {
        CHECK_THROWS_AS(pm::pm_spectrum(reg, cfg, std::span<const double>{}), DomainError);
    }
}
