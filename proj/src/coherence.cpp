#include "entsim/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entsim/constants.hpp"
#include "entsim/errors.hpp"
#include "entsim/quadrature.hpp"

namespace entsim::coherence {

using constants::speed_of_light;
using constants::two_pi;
using materials::Axis;
using materials::MaterialRegistry;

namespace {

constexpr double four_ln2 = 2.772588722239781;  // 4 ln 2

double angular_frequency(double lambda_nm) { return two_pi * speed_of_light / (lambda_nm * 1e-9); }

// intensity transmission |A|^2 at a wavelength, Gaussian with FWHM in intensity
double intensity_at_lambda(const FilterSpec& f, double lambda_nm) {
    const double d = (lambda_nm - f.center_nm) / f.fwhm_nm;
    return std::exp(-four_ln2 * d * d);
}

// filter sigma converted to angular frequency, first order (panelization only)
double filter_sigma_omega(const FilterSpec& f) {
    const double lc = f.center_nm * 1e-9;
    const double fwhm_omega = two_pi * speed_of_light * (f.fwhm_nm * 1e-9) / (lc * lc);
    return fwhm_omega / 2.3548200450309493;  // 2 sqrt(2 ln 2)
}

struct Kernel {
    double w0s = 0.0, w0i = 0.0;
    FilterSpec signal, idler;
    double tau_z = 0.0;
    double phase_tau = 0.0;  // tau_X - kappa
    double prefactor = 1.0;

    // returns {Re(num), Im(num), den} at detuning eps
    std::array<double, 3> operator()(double eps) const {
        const double ws = w0s + eps;
        const double wi = w0i - eps;
        if (ws <= 0.0 || wi <= 0.0) return {0.0, 0.0, 0.0};
        const double lam_s = two_pi * speed_of_light / ws * 1e9;
        const double lam_i = two_pi * speed_of_light / wi * 1e9;
        const double g = prefactor * intensity_at_lambda(signal, lam_s) *
                         intensity_at_lambda(idler, lam_i);
        const double s = quad::sinc(0.5 * tau_z * eps);
        const double t = g * s * s;
        const double ph = phase_tau * eps;
        return {t * std::cos(ph), t * std::sin(ph), t};
    }
};

std::vector<double> build_breakpoints(double window, double sigma, double tau_z,
                                      double half_width_sigmas) {
    std::vector<double> pts{-window, 0.0, window};
    const int kmax = static_cast<int>(std::ceil(half_width_sigmas));
    for (int k = 1; k <= kmax; ++k) {
        const double t = k * sigma;
        if (t >= window) break;
        pts.push_back(t);
        pts.push_back(-t);
    }
    if (tau_z != 0.0) {
        const double lobe = two_pi / std::abs(tau_z);
        const auto count = static_cast<long>(window / lobe);
        const long cap = 4000;
        const long stride = std::max<long>(1, (count + cap - 1) / cap);
        for (long m = stride; m <= count; m += stride) {
            const double z = m * lobe;
            pts.push_back(z);
            pts.push_back(-z);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

Arm arm_from_string(const std::string& s) {
    if (s == "signal") return Arm::Signal;
    if (s == "idler") return Arm::Idler;
    throw ParseError("unknown arm '" + s + "' (expected 'signal' or 'idler')");
}

std::string to_string(Arm arm) { return arm == Arm::Signal ? "signal" : "idler"; }

void InteractionConstants::validate() const {
    if (!(chi2 > 0.0 && f1 > 0.0 && field > 0.0 && hbar_scale > 0.0)) {
        throw ValidationError("InteractionConstants must be strictly positive");
    }
}

void SourceConfig::validate() const {
    crystal.validate();
    constants.validate();
    if (!(signal_filter.center_nm > 0.0 && signal_filter.fwhm_nm > 0.0)) {
        throw ValidationError("signal filter: center and FWHM must be positive");
    }
    if (!(idler_filter.center_nm > 0.0 && idler_filter.fwhm_nm > 0.0)) {
        throw ValidationError("idler filter: center and FWHM must be positive");
    }
    if (plate && !(plate->thickness_mm >= 0.0)) {
        throw ValidationError("plate thickness must be nonnegative");
    }
    if (!(integration.half_width_sigmas >= 5.0)) {
        throw ValidationError("integration half-width must be at least 5 filter sigmas");
    }
    if (!(integration.rel_tol > 0.0 && integration.max_intervals > 1)) {
        throw ValidationError("integration control: bad tolerance or interval budget");
    }
}

double filter_amplitude(const FilterSpec& filter, Arm arm, double eps) {
    const double w0 = angular_frequency(filter.center_nm);
    const double w = arm == Arm::Signal ? w0 + eps : w0 - eps;
    if (w <= 0.0) return 0.0;
    const double lambda_nm = two_pi * speed_of_light / w * 1e9;
    const double d = (lambda_nm - filter.center_nm) / filter.fwhm_nm;
    return std::exp(-0.5 * four_ln2 * d * d);
}

std::pair<double, double> group_delay_taus(const MaterialRegistry& registry,
                                           const SourceConfig& config) {
    const auto& cr = config.crystal;
    const double length_m = cr.length_mm * 1e-3;
    if (length_m == 0.0) return {0.0, 0.0};
    const auto& mx = registry.lookup(cr.material, Axis::X);
    const auto& mz = registry.lookup(cr.material, Axis::Z);
    const double ls_um = cr.signal_nm * 1e-3;
    const double li_um = cr.idler_nm * 1e-3;
    const double tau_x = (materials::group_index(mx, ls_um, cr.temperature_c) -
                          materials::group_index(mx, li_um, cr.temperature_c)) *
                         length_m / speed_of_light;
    const double tau_z = (materials::group_index(mz, ls_um, cr.temperature_c) -
                          materials::group_index(mz, li_um, cr.temperature_c)) *
                         length_m / speed_of_light;
    return {tau_x, tau_z};
}

double plate_kappa(const materials::SellmeierModel& ordinary,
                   const materials::SellmeierModel& extraordinary, double thickness_mm,
                   double lambda_nm, double temp_c) {
    if (!(thickness_mm >= 0.0)) {
        throw DomainError("plate_kappa: thickness must be nonnegative");
    }
    if (thickness_mm == 0.0) return 0.0;
    const double lam_um = lambda_nm * 1e-3;
    const double dng = materials::group_index(ordinary, lam_um, temp_c) -
                       materials::group_index(extraordinary, lam_um, temp_c);
    return dng * thickness_mm * 1e-3 / speed_of_light;
}

double effective_kappa(const MaterialRegistry& registry, const SourceConfig& config) {
    if (!config.plate || config.plate->thickness_mm == 0.0) return 0.0;
    const auto& p = *config.plate;
    const auto& mo = registry.lookup(p.material, Axis::Ordinary);
    const auto& me = registry.lookup(p.material, Axis::Extraordinary);
    const double lambda_nm =
        p.arm == Arm::Idler ? config.crystal.idler_nm : config.crystal.signal_nm;
    const double kappa = plate_kappa(mo, me, p.thickness_mm, lambda_nm, p.temperature_c);
    return p.arm == Arm::Idler ? kappa : -kappa;
}

CoherenceResult rho1122(const MaterialRegistry& registry, const SourceConfig& config) {
    config.validate();
    const auto [tau_x, tau_z] = group_delay_taus(registry, config);
    const double kappa = effective_kappa(registry, config);
    if (tau_z == 0.0 && config.crystal.length_mm > 0.0) {
        throw DomainError("rho1122: zero Z-axis walk-off with finite crystal length");
    }

    Kernel kernel;
    kernel.w0s = angular_frequency(config.crystal.signal_nm);
    kernel.w0i = angular_frequency(config.crystal.idler_nm);
    kernel.signal = config.signal_filter;
    kernel.idler = config.idler_filter;
    kernel.tau_z = tau_z;
    kernel.phase_tau = tau_x - kappa;
    {
        const auto& ic = config.constants;
        const double amp = ic.chi2 * ic.f1 * ic.field / ic.hbar_scale;
        kernel.prefactor = amp * amp;  // cancels in the ratio; houses the symbols
    }

    const double sig_s = filter_sigma_omega(config.signal_filter);
    const double sig_i = filter_sigma_omega(config.idler_filter);
    const double sigma = 1.0 / std::sqrt(1.0 / (sig_s * sig_s) + 1.0 / (sig_i * sig_i));
    double window = config.integration.half_width_sigmas * sigma;
    if (tau_z != 0.0) {
        window = std::max(window, 40.0 * constants::pi / std::abs(tau_z));
    }
    // the detuning map lambda(w0 -+ eps) must stay physical
    window = std::min(window, 0.8 * std::min(kernel.w0s, kernel.w0i));

    const auto pts =
        build_breakpoints(window, sigma, tau_z, config.integration.half_width_sigmas);
    quad::QuadratureOptions opt;
    opt.rel_tol = config.integration.rel_tol;
    opt.max_intervals = config.integration.max_intervals;
    const auto q = quad::integrate_panels<3>(kernel, pts, opt);

    const double den = q.value[2];
    if (!(den > 0.0) || !std::isfinite(den)) {
        throw NumericalError("rho1122: vanishing normalization integral (filters off band?)",
                             q.error);
    }
    const std::complex<double> ratio(q.value[0] / den, q.value[1] / den);
    const double ratio_err = q.error * (1.0 + std::abs(ratio)) / den;
    if (!q.converged) {
        std::ostringstream os;
        os << "rho1122: quadrature did not converge to relative " << config.integration.rel_tol
           << " within " << config.integration.max_intervals
           << " intervals (estimate " << ratio_err << ")";
        throw NumericalError(os.str(), ratio_err);
    }

    CoherenceResult result;
    result.rho1122 = 0.5 * ratio;
    result.visibility = std::abs(ratio);
    result.tau_x_s = tau_x;
    result.tau_z_s = tau_z;
    result.kappa_s = kappa;
    result.diagnostics.error_estimate = 0.5 * ratio_err;
    result.diagnostics.node_count = q.evaluations;
    return result;
}

double asymptotic_rho(const MaterialRegistry& registry, const SourceConfig& config) {
    config.validate();
    const auto [tau_x, tau_z] = group_delay_taus(registry, config);
    if (tau_z == 0.0) {
        throw DomainError("asymptotic_rho: tau_Z = 0 has no infinite-length limit");
    }
    const double kappa = effective_kappa(registry, config);
    return 0.5 * std::max(0.0, 1.0 - std::abs(tau_x - kappa) / std::abs(tau_z));
}

double solve_plate_thickness(const MaterialRegistry& registry, const SourceConfig& config) {
    if (!config.plate) {
        throw DomainError("solve_plate_thickness: config names no plate material/arm");
    }
    config.validate();
    const auto [tau_x, tau_z] = group_delay_taus(registry, config);
    (void)tau_z;
    const auto& p = *config.plate;
    const auto& mo = registry.lookup(p.material, Axis::Ordinary);
    const auto& me = registry.lookup(p.material, Axis::Extraordinary);
    const double lambda_um =
        (p.arm == Arm::Idler ? config.crystal.idler_nm : config.crystal.signal_nm) * 1e-3;
    const double dng = materials::group_index(mo, lambda_um, p.temperature_c) -
                       materials::group_index(me, lambda_um, p.temperature_c);
    if (std::abs(dng) < 1e-12) {
        throw SolverError("solve_plate_thickness: plate has no group birefringence at " +
                          std::to_string(lambda_um) + " um");
    }
    const double sign = p.arm == Arm::Idler ? 1.0 : -1.0;
    return sign * tau_x * speed_of_light / dng * 1e3;  // mm
}

std::vector<ScanRow> coherence_scan(const MaterialRegistry& registry, const SourceConfig& base,
                                    std::span<const double> lengths_mm,
                                    std::span<const double> plate_grid_mm) {
    if (lengths_mm.empty()) {
        throw DomainError("coherence_scan: empty length grid");
    }
    if (!plate_grid_mm.empty() && !base.plate) {
        throw DomainError("coherence_scan: plate-thickness grid given but no plate in config");
    }
    std::vector<ScanRow> rows;
    rows.reserve(lengths_mm.size() * std::max<std::size_t>(1, plate_grid_mm.size()));
    for (const double length : lengths_mm) {
        SourceConfig cfg = base;
        cfg.crystal.length_mm = length;
        if (plate_grid_mm.empty()) {
            const double d = cfg.plate ? cfg.plate->thickness_mm : 0.0;
            try {
                rows.push_back({length, d, rho1122(registry, cfg)});
            } catch (const Error& e) {
                std::ostringstream os;
                os << "coherence_scan at L=" << length << " mm, d=" << d << " mm: " << e.what();
                throw Error(os.str());
            }
        } else {
            for (const double d : plate_grid_mm) {
                cfg.plate->thickness_mm = d;
                try {
                    rows.push_back({length, d, rho1122(registry, cfg)});
                } catch (const Error& e) {
                    std::ostringstream os;
                    os << "coherence_scan at L=" << length << " mm, d=" << d << " mm: "
                       << e.what();
                    throw Error(os.str());
                }
            }
        }
    }
    return rows;
}

}  // namespace entsim::coherence
