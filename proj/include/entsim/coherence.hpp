#pragma once

#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "entsim/materials.hpp"
#include "entsim/phasematch.hpp"

namespace entsim::coherence {

/// Gaussian intensity filter, FWHM in wavelength.
struct FilterSpec {
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
};

enum class Arm { Signal, Idler };

Arm arm_from_string(const std::string& s);
std::string to_string(Arm arm);

/// Birefringent compensation plate. The plate sits outside the oven, so its
/// temperature defaults to ambient.
struct PlateSpec {
    std::string material;
    double thickness_mm = 0.0;
    Arm arm = Arm::Idler;
    double temperature_c = 20.0;
};

struct IntegrationControl {
    double half_width_sigmas = 8.0;  // detuning window in combined filter sigmas
    double rel_tol = 1e-6;
    int max_intervals = 200000;
};

/// Symbols of the interaction strength prefactor. They cancel in the
/// normalized off-diagonal ratio and default to one.
struct InteractionConstants {
    double chi2 = 1.0;
    double f1 = 1.0;
    double field = 1.0;
    double hbar_scale = 1.0;

    void validate() const;
};

/// Full input of the two-crystal coherence integral.
struct SourceConfig {
    phasematch::QpmConfig crystal;
    FilterSpec signal_filter;
    FilterSpec idler_filter;
    std::optional<PlateSpec> plate;
    IntegrationControl integration;
    InteractionConstants constants;

    void validate() const;
};

struct Diagnostics {
    double error_estimate = 0.0;
    long node_count = 0;
};

/// Off-diagonal coherence of the two-crystal state at one (L, d) point.
/// The unobservable global phase is dropped: rho1122 here is the normalized
/// ratio whose magnitude bounds the fringe visibility, V = 2|rho1122|.
struct CoherenceResult {
    std::complex<double> rho1122;
    double visibility = 0.0;
    double tau_x_s = 0.0;
    double tau_z_s = 0.0;
    double kappa_s = 0.0;
    Diagnostics diagnostics;
};

/// Gaussian filter amplitude at detuning eps (rad/s) about the filter center.
/// The photon frequency is w0 + eps for the signal arm and w0 - eps for the
/// idler arm; the detuning-to-wavelength map is exact, not first order.
double filter_amplitude(const FilterSpec& filter, Arm arm, double eps);

/// Signal-idler group-delay walk-off over the crystal length along the X and
/// Z axes: tau = (n_gs - n_gi) L / c, signs preserved.
std::pair<double, double> group_delay_taus(const materials::MaterialRegistry& registry,
                                           const SourceConfig& config);

/// kappa = (n_g^o - n_g^e) d / c for a plate evaluated at the given wavelength.
double plate_kappa(const materials::SellmeierModel& ordinary,
                   const materials::SellmeierModel& extraordinary, double thickness_mm,
                   double lambda_nm, double temp_c = 20.0);

/// Signed kappa entering the compensated phase exp(i (tau_X - kappa) eps).
/// Zero without a plate; a signal-arm plate flips the sign because the
/// detuning enters that arm with the opposite sense.
double effective_kappa(const materials::MaterialRegistry& registry, const SourceConfig& config);

/// Adaptive quadrature of the normalized off-diagonal element.
CoherenceResult rho1122(const materials::MaterialRegistry& registry, const SourceConfig& config);

/// Infinite-crystal-length limit: 0.5 * max(0, 1 - |tau_X - kappa| / |tau_Z|).
double asymptotic_rho(const materials::MaterialRegistry& registry, const SourceConfig& config);

/// Plate thickness (mm) that cancels the walk-off, kappa(d) = tau_X.
/// Requires config.plate to name the material and arm; throws SolverError on
/// zero group birefringence.
double solve_plate_thickness(const materials::MaterialRegistry& registry,
                             const SourceConfig& config);

struct ScanRow {
    double length_mm = 0.0;
    double plate_mm = 0.0;
    CoherenceResult result;
};

/// One rho1122 evaluation per grid point, rows ordered as input (L-major when
/// a plate-thickness grid is given). The first failing point aborts the scan
/// with its coordinates in the error message.
std::vector<ScanRow> coherence_scan(const materials::MaterialRegistry& registry,
                                    const SourceConfig& base, std::span<const double> lengths_mm,
                                    std::span<const double> plate_grid_mm);

}  // namespace entsim::coherence
