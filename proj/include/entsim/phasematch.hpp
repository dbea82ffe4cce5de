#pragma once

#include <span>
#include <string>
#include <vector>

#include "entsim/materials.hpp"

namespace entsim::phasematch {

/// Collinear QPM interaction. All three waves are polarized along the listed
/// crystal axes (Z_p Z_s Z_i for the two-crystal source).
struct QpmConfig {
    double pump_nm = 0.0;
    double signal_nm = 0.0;
    double idler_nm = 0.0;
    double poling_period_um = 0.0;
    double length_mm = 0.0;
    double temperature_c = 20.0;
    std::string material;
    materials::Axis pump_axis = materials::Axis::Z;
    materials::Axis signal_axis = materials::Axis::Z;
    materials::Axis idler_axis = materials::Axis::Z;

    /// Builds a config with the idler slaved to energy conservation.
    static QpmConfig make(double pump_nm, double signal_nm, double poling_period_um,
                          double length_mm, double temperature_c, std::string material);

    /// Enforces 1/lp = 1/ls + 1/li (relative 1e-9), positive period and length.
    void validate() const;
};

/// Energy conservation: 1/li = 1/lp - 1/ls. Throws DomainError if ls <= lp.
double idler_wavelength(double pump_nm, double signal_nm);

/// dk_z = k_s + k_i - k_p + 2*pi/Lambda in 1/m; zero iff quasi-phase-matched.
double qpm_mismatch(const materials::MaterialRegistry& registry, const QpmConfig& config);

/// Mismatch of the bare interaction (no grating), k_s + k_i - k_p in 1/m.
double bulk_mismatch(const materials::MaterialRegistry& registry, const QpmConfig& config);

/// First-order poling period in um that nulls the mismatch, by bracketed
/// bisection over [1, 100] um. Returns +infinity when the bulk interaction is
/// already matched (no grating needed); throws SolverError when no positive
/// root exists in the bracket.
double solve_poling_period(const materials::MaterialRegistry& registry, double signal_nm,
                           double pump_nm, double temperature_c, const std::string& material,
                           materials::Axis pump_axis = materials::Axis::Z,
                           materials::Axis signal_axis = materials::Axis::Z,
                           materials::Axis idler_axis = materials::Axis::Z);

struct SpectrumPoint {
    double signal_nm = 0.0;
    double intensity = 0.0;  // relative, peak normalized to 1
};

/// Plane-wave spectral envelope sinc^2(L dk/2) over a signal-wavelength grid,
/// idler slaved to energy conservation, normalized to unit peak.
std::vector<SpectrumPoint> pm_spectrum(const materials::MaterialRegistry& registry,
                                       const QpmConfig& config,
                                       std::span<const double> signal_grid_nm);

}  // namespace entsim::phasematch
