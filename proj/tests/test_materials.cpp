#include <doctest.h>

#include <cmath>

#include "entsim/errors.hpp"
#include "entsim/materials.hpp"
#include "test_util.hpp"

using namespace entsim;
using materials::Axis;
using materials::SellmeierForm;
using materials::SellmeierModel;

namespace {

SellmeierModel constant_model(double n0) {
    SellmeierModel m;
    m.name = "test";
    m.axis = Axis::Z;
    m.form = SellmeierForm::Constant;
    m.coefficients = {n0};
    m.wavelength_range_um = {0.1, 10.0};
    m.temperature_range_c = {-50.0, 250.0};
    m.normal_dispersion_range_um = m.wavelength_range_um;
    return m;
}

double fd_group_index(const SellmeierModel& m, double lam, double temp) {
    const double step = 1e-4;  // 0.1 nm
    const double n = materials::refractive_index(m, lam, temp);
    const double dn = (materials::refractive_index(m, lam + step, temp) -
                       materials::refractive_index(m, lam - step, temp)) /
                      (2.0 * step);
    return n - lam * dn;
}

}  // namespace

TEST_CASE("constant-index models") {
    const auto vacuum = constant_model(1.0);
    CHECK(materials::refractive_index(vacuum, 0.81, 25.0) == doctest::Approx(1.0));
    CHECK(materials::group_index(vacuum, 0.81, 25.0) == doctest::Approx(1.0));

    const auto glassy = constant_model(1.8);
    CHECK(materials::refractive_index(glassy, 0.4, 25.0) == doctest::Approx(1.8));
    CHECK(materials::refractive_index(glassy, 3.0, 25.0) == doctest::Approx(1.8));
    CHECK(materials::group_index(glassy, 1.55, 25.0) == doctest::Approx(1.8));
}

TEST_CASE("bundled registry resolves the source materials") {
    const auto reg = materials::load_registry(testutil::data_file("materials.json"));
    CHECK(reg.contains("KTP", Axis::X));
    CHECK(reg.contains("KTP", Axis::Z));
    CHECK(reg.contains("LN", Axis::X));
    CHECK(reg.contains("LN", Axis::Z));
    CHECK(reg.contains("calcite", Axis::Ordinary));
    CHECK(reg.contains("calcite", Axis::Extraordinary));

    // lookups are pure: identical results on repeated calls
    const auto& a = reg.lookup("KTP", Axis::Z);
    const auto& b = reg.lookup("KTP", Axis::Z);
    CHECK(&a == &b);
    CHECK(materials::refractive_index(a, 0.81, 25.0) ==
          materials::refractive_index(b, 0.81, 25.0));
}

TEST_CASE("KTP Z-axis index matches the independent evaluation") {
    // Hand evaluation of the published coefficient set in a throwaway script.
    const auto reg = materials::load_registry(testutil::data_file("materials.json"));
    const auto& ktp_z = reg.lookup("KTP", Axis::Z);
    CHECK(materials::refractive_index(ktp_z, 0.810, 25.0) ==
          doctest::Approx(1.844448218).epsilon(1e-6));
    CHECK(materials::group_index(ktp_z, 0.810, 25.0) ==
          doctest::Approx(1.909651580).epsilon(1e-5));
}

TEST_CASE("analytic group index agrees with the finite-difference oracle") {
    const auto reg = materials::load_registry(testutil::data_file("materials.json"));
    for (const auto& [key, model] : reg.models()) {
        const double lo = model.wavelength_range_um[0] + 5e-3;
        const double hi = model.wavelength_range_um[1] - 5e-3;
        const double temp = 0.5 * (model.temperature_range_c[0] + model.temperature_range_c[1]);
        for (int i = 0; i <= 40; ++i) {
            const double lam = lo + (hi - lo) * i / 40.0;
            const double analytic = materials::group_index(model, lam, temp);
            const double oracle = fd_group_index(model, lam, temp);
            CHECK(analytic == doctest::Approx(oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("index is monotone decreasing over the declared normal-dispersion region") {
    const auto reg = materials::load_registry(testutil::data_file("materials.json"));
    for (const auto& [key, model] : reg.models()) {
        const double lo = model.normal_dispersion_range_um[0];
        const double hi = model.normal_dispersion_range_um[1];
        const double temp = 25.0;
        double prev = materials::refractive_index(model, lo, temp);
        for (int i = 1; i <= 60; ++i) {
            const double lam = lo + (hi - lo) * i / 60.0;
            const double n = materials::refractive_index(model, lam, temp);
            CHECK(n < prev);
            // normal dispersion: group index exceeds phase index
            CHECK(materials::group_index(model, lam, temp) > n);
            prev = n;
        }
    }
}

TEST_CASE("range errors name the offending bound") {
    const auto reg = materials::load_registry(testutil::data_file("materials.json"));
    const auto& ktp_z = reg.lookup("KTP", Axis::Z);
    CHECK_THROWS_AS(materials::refractive_index(ktp_z, 0.2, 25.0), RangeError);
    CHECK_THROWS_AS(materials::refractive_index(ktp_z, 0.81, 500.0), RangeError);
    try {
        materials::refractive_index(ktp_z, 0.2, 25.0);
    } catch (const RangeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("0.43") != std::string::npos);  // the violated bound
    }
}

TEST_CASE("registry loading edge cases") {
    SUBCASE("empty file gives empty registry") {
        const auto path = testutil::write_temp_file("empty_materials.json", "\n  \n");
        const auto reg = materials::load_registry(path);
        CHECK(reg.size() == 0);
        CHECK_THROWS_AS(reg.lookup("KTP", Axis::Z), LookupError);
    }
    SUBCASE("duplicate (material, axis) keys are rejected") {
        const std::string doc = R"({
          "models": [
            {"material": "KTP", "axis": "Z", "form": "constant", "coefficients": [1.8],
             "wavelength_range_um": [0.4, 3.0], "temperature_range_c": [0, 100]},
            {"material": "KTP", "axis": "Z", "form": "constant", "coefficients": [1.9],
             "wavelength_range_um": [0.4, 3.0], "temperature_range_c": [0, 100]}
          ]})";
        const auto path = testutil::write_temp_file("dup_materials.json", doc);
        CHECK_THROWS_AS(materials::load_registry(path), ParseError);
        CHECK_THROWS_WITH_AS(materials::load_registry(path),
                             doctest::Contains("duplicate"), ParseError);
    }
    SUBCASE("malformed document reports parse context") {
        const auto path = testutil::write_temp_file("broken_materials.json", "{ nope");
        CHECK_THROWS_AS(materials::load_registry(path), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(materials::load_registry("/nonexistent/materials.json"), ParseError);
    }
    SUBCASE("coefficient count must fit the form") {
        const std::string doc = R"({
          "models": [
            {"material": "bad", "axis": "Z", "form": "pole_sum", "coefficients": [1.0, 2.0],
             "wavelength_range_um": [0.4, 3.0], "temperature_range_c": [0, 100]}
          ]})";
        const auto path = testutil::write_temp_file("badform_materials.json", doc);
        CHECK_THROWS_AS(materials::load_registry(path), ValidationError);
    }
}
