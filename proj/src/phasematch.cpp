#include "entsim/phasematch.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "entsim/constants.hpp"
#include "entsim/errors.hpp"
#include "entsim/quadrature.hpp"

namespace entsim::phasematch {

using constants::two_pi;
using materials::Axis;
using materials::MaterialRegistry;

namespace {

// wave number 2 pi n / lambda in 1/m, lambda given in nm
double wave_number(const MaterialRegistry& reg, const std::string& material, Axis axis,
                   double lambda_nm, double temp_c) {
    const auto& model = reg.lookup(material, axis);
    const double n = materials::refractive_index(model, lambda_nm * 1e-3, temp_c);
    return two_pi * n / (lambda_nm * 1e-9);
}

}  // namespace

QpmConfig QpmConfig::make(double pump_nm, double signal_nm, double poling_period_um,
                          double length_mm, double temperature_c, std::string material) {
    QpmConfig cfg;
    cfg.pump_nm = pump_nm;
    cfg.signal_nm = signal_nm;
    cfg.idler_nm = idler_wavelength(pump_nm, signal_nm);
    cfg.poling_period_um = poling_period_um;
    cfg.length_mm = length_mm;
    cfg.temperature_c = temperature_c;
    cfg.material = std::move(material);
    cfg.validate();
    return cfg;
}

void QpmConfig::validate() const {
    if (!(pump_nm > 0.0 && signal_nm > 0.0 && idler_nm > 0.0)) {
        throw ValidationError("QpmConfig: wavelengths must be positive");
    }
    const double lhs = 1.0 / pump_nm;
    const double rhs = 1.0 / signal_nm + 1.0 / idler_nm;
    if (std::abs(lhs - rhs) > 1e-9 * lhs) {
        std::ostringstream os;
        os << "QpmConfig: energy conservation violated: 1/" << pump_nm << " != 1/" << signal_nm
           << " + 1/" << idler_nm << " (relative error " << std::abs(lhs - rhs) / lhs << ")";
        throw ValidationError(os.str());
    }
    if (!(poling_period_um > 0.0)) {
        throw ValidationError("QpmConfig: poling period must be positive");
    }
    if (!(length_mm >= 0.0)) {
        throw ValidationError("QpmConfig: crystal length must be nonnegative");
    }
}

double idler_wavelength(double pump_nm, double signal_nm) {
    if (!(pump_nm > 0.0)) {
        throw DomainError("idler_wavelength: pump wavelength must be positive");
    }
    if (!(signal_nm > pump_nm)) {
        std::ostringstream os;
        os << "idler_wavelength: no downconversion for signal " << signal_nm
           << " nm <= pump " << pump_nm << " nm";
        throw DomainError(os.str());
    }
    return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

double bulk_mismatch(const MaterialRegistry& registry, const QpmConfig& config) {
    config.validate();
    const double ks = wave_number(registry, config.material, config.signal_axis,
                                  config.signal_nm, config.temperature_c);
    const double ki = wave_number(registry, config.material, config.idler_axis,
                                  config.idler_nm, config.temperature_c);
    const double kp = wave_number(registry, config.material, config.pump_axis,
                                  config.pump_nm, config.temperature_c);
    return ks + ki - kp;
}

double qpm_mismatch(const MaterialRegistry& registry, const QpmConfig& config) {
    const double grating = std::isinf(config.poling_period_um)
                               ? 0.0
                               : two_pi / (config.poling_period_um * 1e-6);
    return bulk_mismatch(registry, config) + grating;
}

double solve_poling_period(const MaterialRegistry& registry, double signal_nm, double pump_nm,
                           double temperature_c, const std::string& material, Axis pump_axis,
                           Axis signal_axis, Axis idler_axis) {
    QpmConfig probe;
    probe.pump_nm = pump_nm;
    probe.signal_nm = signal_nm;
    probe.idler_nm = idler_wavelength(pump_nm, signal_nm);
    probe.poling_period_um = 1.0;  // placeholder, bulk term only
    probe.length_mm = 0.0;
    probe.temperature_c = temperature_c;
    probe.material = material;
    probe.pump_axis = pump_axis;
    probe.signal_axis = signal_axis;
    probe.idler_axis = idler_axis;

    const double bulk = bulk_mismatch(registry, probe);
    constexpr double tol = 0.1;  // |dk| target, 1/m
    if (std::abs(bulk) < tol) {
        return std::numeric_limits<double>::infinity();  // bulk-matched, no grating needed
    }
    if (bulk > 0.0) {
        throw SolverError("solve_poling_period: bulk mismatch is positive (" +
                          std::to_string(bulk) + " 1/m); a forward grating cannot compensate");
    }

    // dk(Lambda) = bulk + 2 pi / Lambda is monotone in 1/Lambda; bisect there.
    auto mismatch_at = [bulk](double period_um) { return bulk + two_pi / (period_um * 1e-6); };
    double lo = 1.0, hi = 100.0;  // um
    if (mismatch_at(lo) < 0.0 || mismatch_at(hi) > 0.0) {
        std::ostringstream os;
        os << "solve_poling_period: no root in [1, 100] um (bulk mismatch " << bulk << " 1/m)";
        throw SolverError(os.str());
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * mid; ++it) {
        mid = 0.5 * (lo + hi);
        (mismatch_at(mid) > 0.0 ? lo : hi) = mid;
    }
    if (std::abs(mismatch_at(mid)) >= tol) {
        throw SolverError("solve_poling_period: bisection did not converge");
    }
    return mid;
}

std::vector<SpectrumPoint> pm_spectrum(const MaterialRegistry& registry, const QpmConfig& config,
                                       std::span<const double> signal_grid_nm) {
    config.validate();
    if (signal_grid_nm.empty()) {
        throw DomainError("pm_spectrum: empty wavelength grid");
    }
    std::vector<SpectrumPoint> out;
    out.reserve(signal_grid_nm.size());
    const double half_length_m = 0.5 * config.length_mm * 1e-3;
    double peak = 0.0;
    for (const double ls : signal_grid_nm) {
        QpmConfig point = config;
        point.signal_nm = ls;
        point.idler_nm = idler_wavelength(config.pump_nm, ls);
        const double dk = qpm_mismatch(registry, point);
        const double s = quad::sinc(half_length_m * dk);
        const double intensity = s * s;
        peak = std::max(peak, intensity);
        out.push_back({ls, intensity});
    }
    if (peak > 0.0) {
        for (auto& p : out) p.intensity /= peak;
    }
    return out;
}

}  // namespace entsim::phasematch
