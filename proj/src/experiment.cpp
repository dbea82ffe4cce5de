#include "entsim/experiment.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "entsim/constants.hpp"
#include "entsim/errors.hpp"

namespace entsim::experiment {

using constants::pi;
using constants::planck;
using constants::speed_of_light;

namespace {

void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(name) + " = " + std::to_string(v) + " outside [0, 1]");
    }
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw DomainError(std::string(name) + " = " + std::to_string(v) + " must be positive");
    }
}

}  // namespace

ChshSettings ChshSettings::defaults() { return {-pi / 16.0, 0.0, pi / 16.0, pi / 8.0}; }

double rate_function(int i, int j, double visibility, double phi_s, double phi_i) {
    if ((i != 1 && i != -1) || (j != 1 && j != -1)) {
        throw DomainError("rate_function: output-arm indices must be +1 or -1");
    }
    require_unit_interval(visibility, "visibility");
    return 0.5 * (1.0 + i * j * visibility * std::cos(4.0 * phi_s + 4.0 * phi_i));
}

double correlation(double visibility, double phi_s, double phi_i) {
    require_unit_interval(visibility, "visibility");
    return visibility * std::cos(4.0 * phi_s + 4.0 * phi_i);
}

double chsh_s(double e11, double e12, double e21, double e22) {
    for (double e : {e11, e12, e21, e22}) {
        if (!(e >= -1.0 && e <= 1.0)) {
            throw DomainError("chsh_s: correlation value " + std::to_string(e) +
                              " outside [-1, 1]");
        }
    }
    return e11 + e12 + std::abs(e21 - e22);
}

double s_from_visibilities(double v_hv, double v_da) {
    require_unit_interval(v_hv, "V_HV");
    require_unit_interval(v_da, "V_DA");
    return std::sqrt(2.0) * (v_hv + v_da);
}

double sigma_s(double r_max_hz, double integration_time_s) {
    require_positive(r_max_hz, "R_max");
    require_positive(integration_time_s, "T_R");
    return 2.0 / std::sqrt(2.0 * r_max_hz * integration_time_s);
}

double violation_speed(double s_measured, double r_max_hz) {
    require_positive(r_max_hz, "R_max");
    return 0.5 * (s_measured - 2.0) * std::sqrt(2.0 * r_max_hz);
}

MultiPair multi_pair_probability(double gate_time_s, double conversion_efficiency,
                                 double pump_power_w, double pump_wavelength_m) {
    require_positive(gate_time_s, "gate time");
    require_positive(conversion_efficiency, "conversion efficiency");
    require_positive(pump_power_w, "pump power");
    require_positive(pump_wavelength_m, "pump wavelength");
    const double photon_rate = pump_power_w * pump_wavelength_m / (planck * speed_of_light);
    const double m = gate_time_s * conversion_efficiency * photon_rate;
    return {m, 1.0 - (1.0 + m) * std::exp(-m)};
}

double pair_coupling(double gamma_s, double mu_is) {
    require_unit_interval(gamma_s, "gamma_s");
    require_unit_interval(mu_is, "mu_is");
    return mu_is * gamma_s;
}

double production_rate(double pair_rate_hz, double bandwidth_nm, double center_nm,
                       double pump_power_mw) {
    if (!(pair_rate_hz >= 0.0)) throw DomainError("production_rate: negative pair rate");
    require_positive(bandwidth_nm, "filter bandwidth");
    require_positive(center_nm, "filter center");
    require_positive(pump_power_mw, "pump power");
    const double center_m = center_nm * 1e-9;
    const double dnu_thz = speed_of_light * (bandwidth_nm * 1e-9) / (center_m * center_m) * 1e-12;
    return pair_rate_hz / (dnu_thz * pump_power_mw);
}

double accidental_rate(double r_signal_hz, double r_idler_hz, double gate_time_s) {
    if (!(r_signal_hz >= 0.0 && r_idler_hz >= 0.0 && gate_time_s >= 0.0)) {
        throw DomainError("accidental_rate: inputs must be nonnegative");
    }
    return r_signal_hz * (1.0 - std::exp(-r_idler_hz * gate_time_s));
}

double spectral_resolution_nm(double lambda_nm, double gate_time_s) {
    require_positive(lambda_nm, "wavelength");
    require_positive(gate_time_s, "gate time");
    const double lambda_m = lambda_nm * 1e-9;
    return lambda_m * lambda_m / (speed_of_light * gate_time_s) * 1e9;
}

void CountRecord::validate() const {
    for (double r : {r_s_hz, r_i_hz, r_p_hz, r_c_hz}) {
        if (!(r >= 0.0)) throw ValidationError("CountRecord: negative rate");
    }
    if (!(pump_mw > 0.0)) throw ValidationError("CountRecord: pump power must be positive");
    for (double t : {t_signal, t_idler}) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw ValidationError("CountRecord: filter transmission outside (0, 1]");
        }
    }
}

std::vector<CountRecord> load_count_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open rates fixture '" + path + "'");

    std::string line;
    std::vector<std::string> header;
    std::vector<CountRecord> records;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        if (header.empty()) {
            std::string col;
            while (ss >> col) header.push_back(col);
            continue;
        }
        std::map<std::string, double> row;
        for (const auto& col : header) {
            double v = 0.0;
            if (!(ss >> v)) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " numeric fields");
            }
            row[col] = v;
        }
        auto get = [&](const char* name) {
            const auto it = row.find(name);
            if (it == row.end()) {
                throw ParseError(path + ": missing column '" + std::string(name) + "'");
            }
            return it->second;
        };
        CountRecord r;
        r.pump_mw = get("p_pump_mw");
        r.gamma_s = get("gamma_s");
        r.gamma_i = get("gamma_i");
        r.gamma_c = get("gamma_c");
        r.mu_is = get("mu_is");
        r.sigma = get("sigma");
        r.r_s_hz = get("r_s_hz");
        r.r_i_hz = get("r_i_hz");
        r.r_p_hz = get("r_p_hz");
        r.r_c_hz = get("r_c_hz");
        r.beta = get("beta");
        r.r_c_prod = get("r_c_prod");
        r.gate_rate_hz = get("gate_rate_hz");
        r.gate_time_s = get("gate_time_ns") * 1e-9;
        r.t_signal = get("t_signal");
        r.t_idler = get("t_idler");
        r.filter_bw_nm = get("filter_bw_nm");
        r.filter_center_nm = get("filter_center_nm");
        r.pump_nm = get("pump_nm");
        r.validate();
        records.push_back(r);
    }
    if (records.empty()) {
        throw ParseError(path + ": no data rows");
    }
    return records;
}

}  // namespace entsim::experiment
