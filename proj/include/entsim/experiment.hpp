#pragma once

#include <string>
#include <vector>

namespace entsim::experiment {

/// Analyzer half-wave-plate angle pairs for the four CHSH correlation
/// measurements: (s1,i1), (s1,i2), (s2,i1), (s2,i2). Angles are HWP angles,
/// so correlations carry the 4*phi periodicity (analyzer rotation = 2*phi).
struct ChshSettings {
    double signal1 = 0.0;
    double idler1 = 0.0;
    double signal2 = 0.0;
    double idler2 = 0.0;

    static ChshSettings defaults();  // (-pi/16, 0) and (pi/16, pi/8)
};

/// Relative coincidence rate R_ij = (1 + i j V cos(4 phi_s + 4 phi_i)) / 2
/// for PBS output arms i, j in {+1, -1}.
double rate_function(int i, int j, double visibility, double phi_s, double phi_i);

/// Correlation function E = V cos(4 phi_s + 4 phi_i).
double correlation(double visibility, double phi_s, double phi_i);

/// CHSH combination S = E11 + E12 + |E21 - E22|.
double chsh_s(double e11, double e12, double e21, double e22);

/// S = sqrt(2) (V_HV + V_DA) at the default settings.
double s_from_visibilities(double v_hv, double v_da);

/// Standard deviation of S from Poissonian counting, 2 / sqrt(2 R_max T_R).
double sigma_s(double r_max_hz, double integration_time_s);

/// Speed of CHSH violation x = (S_m - 2) sqrt(2 R_max) / 2 in 1/sqrt(s).
double violation_speed(double s_measured, double r_max_hz);

struct MultiPair {
    double mean_pairs = 0.0;    // m, mean pair number per gate
    double p_multi = 0.0;       // P(n >= 2) = 1 - (1 + m) exp(-m)
};

/// Multi-pair emission probability within one random gate for a cw pump.
MultiPair multi_pair_probability(double gate_time_s, double conversion_efficiency,
                                 double pump_power_w, double pump_wavelength_m);

/// Pair coupling from the conditional coincidence: gamma_c = mu_is * gamma_s.
double pair_coupling(double gamma_s, double mu_is);

/// Fiber pair rate normalized per THz of filter bandwidth and per mW of pump,
/// with the bandwidth converted as dnu = c dlambda / lambda^2.
double production_rate(double pair_rate_hz, double bandwidth_nm, double center_nm,
                       double pump_power_mw);

/// Accidental coincidences for a signal-triggered gate of width dt:
/// R_s (1 - exp(-R_i dt)), the probability that at least one uncorrelated
/// idler falls in the gate.
double accidental_rate(double r_signal_hz, double r_idler_hz, double gate_time_s);

/// Frequency resolution available from detector timing, in nm.
double spectral_resolution_nm(double lambda_nm, double gate_time_s);

/// One row of the measured-rates table.
struct CountRecord {
    double pump_mw = 0.0;
    double gamma_s = 0.0;
    double gamma_i = 0.0;
    double gamma_c = 0.0;    // printed pair coupling (kept as data, see notes)
    double mu_is = 0.0;
    double sigma = 0.0;      // correlation efficiency, stored not recomputed
    double r_s_hz = 0.0;
    double r_i_hz = 0.0;
    double r_p_hz = 0.0;
    double r_c_hz = 0.0;
    double beta = 0.0;
    double r_c_prod = 0.0;   // printed production rate [1/(s THz mW)]
    double gate_rate_hz = 0.0;
    double gate_time_s = 0.0;
    double t_signal = 1.0;
    double t_idler = 1.0;
    double filter_bw_nm = 0.0;
    double filter_center_nm = 0.0;
    double pump_nm = 0.0;

    void validate() const;
};

/// Loads the tab-delimited rates fixture (header row naming the columns).
std::vector<CountRecord> load_count_records(const std::string& path);

}  // namespace entsim::experiment
