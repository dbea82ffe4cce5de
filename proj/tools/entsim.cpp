// entsim: two-crystal QPM entanglement source calculator.
//
// Subcommands: pm, coherence-scan, compensation-map, metrics, chsh, rates.
// Tables are tab-delimited with a header row and 17-significant-digit values
// so regression diffs are byte-stable; --summary switches to a rounded view.
// Exit codes: 0 ok, 1 numerical failure, 2 input error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "entsim/coherence.hpp"
#include "entsim/errors.hpp"
#include "entsim/experiment.hpp"
#include "entsim/io.hpp"
#include "entsim/materials.hpp"
#include "entsim/phasematch.hpp"
#include "entsim/quantum.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string materials_path;
    std::string scenario_path;
    std::string out_dir;
    std::string format = "table";
    unsigned seed = 12345;
    bool summary = false;
};

std::string fmt(double v, bool summary) {
    if (!summary) return entsim::io::format_full(v);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

class TableWriter {
  public:
    TableWriter(std::vector<std::string> columns, bool summary)
        : columns_(std::move(columns)), summary_(summary) {}

    void row(const std::vector<double>& values) {
        std::ostringstream os;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) os << '\t';
            os << fmt(values[i], summary_);
        }
        rows_.push_back(os.str());
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) os << '\t';
            os << columns_[i];
        }
        os << '\n';
        for (const auto& r : rows_) os << r << '\n';
        return os.str();
    }

  private:
    std::vector<std::string> columns_;
    bool summary_;
    std::vector<std::string> rows_;
};

void emit(const CommonOpts& opts, const std::string& filename, const std::string& content) {
    if (opts.out_dir.empty()) {
        std::cout << content;
        return;
    }
    fs::create_directories(opts.out_dir);
    const fs::path path = fs::path(opts.out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw entsim::ParseError("cannot write output file '" + path.string() + "'");
    out << content;
    std::cout << path.string() << "\n";
}

void emit_doc(const CommonOpts& opts, const std::string& filename, const ordered_json& doc) {
    emit(opts, filename, doc.dump(2) + "\n");
}

entsim::materials::MaterialRegistry load_materials(const CommonOpts& opts) {
    if (opts.materials_path.empty()) {
        throw entsim::ParseError("missing --materials PATH");
    }
    if (!fs::exists(opts.materials_path)) {
        throw entsim::ParseError("material file '" + opts.materials_path + "' does not exist");
    }
    return entsim::materials::load_registry(opts.materials_path);
}

entsim::io::Scenario load_scenario(const CommonOpts& opts) {
    if (opts.scenario_path.empty()) {
        throw entsim::ParseError("missing --scenario PATH");
    }
    if (!fs::exists(opts.scenario_path)) {
        throw entsim::ParseError("scenario file '" + opts.scenario_path + "' does not exist");
    }
    return entsim::io::load_scenario(opts.scenario_path);
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool wants_scenario) {
    cmd->add_option("--materials", opts.materials_path, "material data file (JSON)");
    if (wants_scenario) {
        cmd->add_option("--scenario", opts.scenario_path,
                        "scenario file (JSON: schema_version, crystal{material, pump_nm, "
                        "signal_nm, idler_nm|\"auto\", poling_period_um, length_mm, "
                        "temperature_c}, signal_filter/idler_filter{center_nm, fwhm_nm}, "
                        "optional plate{material, thickness_mm, arm, temperature_c}, optional "
                        "integration{half_width_sigmas, rel_tol}, scan{lengths_mm, plate_mm})");
    }
    cmd->add_option("--out", opts.out_dir, "output directory (default: print to stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"table", "doc"}));
    cmd->add_option("--seed", opts.seed, "random seed for sampling demos");
    cmd->add_flag("--summary", opts.summary, "human-readable rounded output");
}

// ---------------------------------------------------------------------------

int run_coherence_scan(const CommonOpts& opts) {
    const auto registry = load_materials(opts);
    const auto scenario = load_scenario(opts);
    std::vector<double> lengths = scenario.lengths_mm;
    if (lengths.empty()) lengths.push_back(scenario.source.crystal.length_mm);

    const auto rows = entsim::coherence::coherence_scan(registry, scenario.source, lengths, {});
    TableWriter table({"length_mm", "plate_mm", "visibility", "tau_x_s", "tau_z_s", "kappa_s"},
                      opts.summary);
    for (const auto& r : rows) {
        table.row({r.length_mm, r.plate_mm, r.result.visibility, r.result.tau_x_s,
                   r.result.tau_z_s, r.result.kappa_s});
    }
    emit(opts, "coherence_scan.tsv", table.str());
    return 0;
}

int run_compensation_map(const CommonOpts& opts) {
    const auto registry = load_materials(opts);
    const auto scenario = load_scenario(opts);
    if (!scenario.source.plate) {
        throw entsim::ParseError("compensation-map: scenario does not define a plate");
    }
    if (scenario.lengths_mm.empty() || scenario.plate_mm.empty()) {
        throw entsim::ParseError("compensation-map: scenario needs scan.lengths_mm and "
                                 "scan.plate_mm grids");
    }

    const auto rows = entsim::coherence::coherence_scan(registry, scenario.source,
                                                        scenario.lengths_mm, scenario.plate_mm);
    TableWriter grid({"length_mm", "plate_mm", "visibility", "tau_x_s", "tau_z_s", "kappa_s"},
                     opts.summary);
    for (const auto& r : rows) {
        grid.row({r.length_mm, r.plate_mm, r.result.visibility, r.result.tau_x_s,
                  r.result.tau_z_s, r.result.kappa_s});
    }
    emit(opts, "compensation_map.tsv", grid.str());

    // per-length optimum over the grid, next to the exactly solved thickness
    TableWriter ridge({"length_mm", "plate_mm_best", "visibility_best", "plate_mm_solved"},
                      opts.summary);
    const std::size_t nd = scenario.plate_mm.size();
    for (std::size_t li = 0; li < scenario.lengths_mm.size(); ++li) {
        const auto* best = &rows[li * nd];
        for (std::size_t di = 1; di < nd; ++di) {
            const auto* cand = &rows[li * nd + di];
            if (cand->result.visibility > best->result.visibility) best = cand;
        }
        auto cfg = scenario.source;
        cfg.crystal.length_mm = scenario.lengths_mm[li];
        const double solved = entsim::coherence::solve_plate_thickness(registry, cfg);
        ridge.row({best->length_mm, best->plate_mm, best->result.visibility, solved});
    }
    emit(opts, "compensation_ridge.tsv", ridge.str());
    return 0;
}

int run_metrics(const CommonOpts& opts, const std::string& fixture_path, int sample_counts) {
    namespace q = entsim::quantum;
    if (!fs::exists(fixture_path)) {
        throw entsim::ParseError("density fixture '" + fixture_path + "' does not exist");
    }
    const auto raw = q::load_density_fixture(fixture_path);
    const auto rho = q::DensityMatrix::fixture_lenient(raw);

    ordered_json doc;
    doc["fixture"] = fixture_path;
    doc["visibility_2rho1122"] = 2.0 * rho.rho1122().real();
    doc["rho1122_magnitude"] = std::abs(rho.rho1122());
    doc["fidelity_max_phi"] = q::max_fidelity_over_phi(rho);
    doc["concurrence"] = q::concurrence(rho);
    doc["entanglement_of_formation"] = q::entanglement_of_formation(rho);
    doc["chsh_default_angles"] = q::chsh_from_density(rho);
    doc["min_eigenvalue"] = rho.min_eigenvalue();

    if (sample_counts > 0) {
        // Poisson-sampled tomography round trip; project the fixture first so
        // the expected rates are nonnegative.
        const auto settings = q::TomographyRecord::default_settings();
        const auto expected = q::expected_counts(rho, settings, 1.0);
        q::TomographyRecord reference;
        for (std::size_t i = 0; i < settings.size(); ++i) {
            reference.entries.push_back({settings[i], std::max(0.0, expected[i]), 1.0});
        }
        const auto projected =
            q::tomography_reconstruct(reference, q::TomographyMethod::LikelihoodProjected);
        const auto rates = q::expected_counts(projected.rho, settings,
                                              static_cast<double>(sample_counts));
        std::mt19937 rng(opts.seed);
        q::TomographyRecord sampled;
        for (std::size_t i = 0; i < settings.size(); ++i) {
            std::poisson_distribution<long> pois(std::max(0.0, rates[i]));
            sampled.entries.push_back({settings[i], static_cast<double>(pois(rng)), 1.0});
        }
        const auto recon = q::tomography_reconstruct(sampled,
                                                     q::TomographyMethod::LikelihoodProjected);
        ordered_json demo;
        demo["counts_per_setting"] = sample_counts;
        demo["seed"] = opts.seed;
        demo["reconstructed_concurrence"] = q::concurrence(recon.rho);
        demo["reconstructed_fidelity_max_phi"] = q::max_fidelity_over_phi(recon.rho);
        demo["raw_inversion_min_eigenvalue"] = recon.min_eigenvalue;
        doc["tomography_demo"] = demo;
    }
    emit_doc(opts, "metrics.json", doc);
    return 0;
}

int run_chsh(const CommonOpts& opts, std::optional<double> v_hv, std::optional<double> v_da,
             std::optional<double> r_max, std::optional<double> t_r, std::optional<double> s_m,
             std::optional<double> x_in) {
    namespace ex = entsim::experiment;
    ordered_json doc;
    std::optional<double> s;
    if (v_hv && v_da) {
        s = ex::s_from_visibilities(*v_hv, *v_da);
        doc["s_from_visibilities"] = *s;
    }
    if (s_m) {
        s = *s_m;
        doc["s_measured"] = *s_m;
    }
    if (!s) {
        throw entsim::ParseError("chsh: need either --v-hv and --v-da, or --s-m");
    }
    doc["s"] = *s;
    if (r_max && t_r) doc["sigma_s"] = ex::sigma_s(*r_max, *t_r);
    std::optional<double> x = x_in;
    if (r_max) x = ex::violation_speed(*s, *r_max);
    if (x) {
        doc["violation_speed"] = *x;
        if (t_r) doc["n_standard_deviations"] = *x * std::sqrt(*t_r);
    }
    doc["violated"] = (*s > 2.0);
    emit_doc(opts, "chsh.json", doc);
    return 0;
}

int run_rates(const CommonOpts& opts, const std::string& fixture_path) {
    namespace ex = entsim::experiment;
    if (!fs::exists(fixture_path)) {
        throw entsim::ParseError("rates fixture '" + fixture_path + "' does not exist");
    }
    const auto records = ex::load_count_records(fixture_path);
    TableWriter table({"p_pump_mw", "mean_pairs_per_gate", "p_multi_pair", "r_c_prod",
                       "gamma_c_formula", "accidental_hz"},
                      opts.summary);
    for (const auto& r : records) {
        const auto mp = ex::multi_pair_probability(r.gate_time_s, r.beta, r.pump_mw * 1e-3,
                                                   r.pump_nm * 1e-9);
        const double prod = ex::production_rate(r.r_c_hz, r.filter_bw_nm, r.filter_center_nm,
                                                r.pump_mw);
        const double gamma_c = ex::pair_coupling(r.gamma_s, r.mu_is);
        const double acc = ex::accidental_rate(r.r_s_hz, r.r_i_hz, r.gate_time_s);
        table.row({r.pump_mw, mp.mean_pairs, mp.p_multi, prod, gamma_c, acc});
    }
    emit(opts, "rates.tsv", table.str());
    return 0;
}

int run_pm(const CommonOpts& opts, const std::string& material, double pump_nm, double signal_nm,
           double temperature_c, std::optional<double> period_um, double length_mm,
           std::optional<double> scan_from, std::optional<double> scan_to, int scan_points) {
    namespace pm = entsim::phasematch;
    const auto registry = load_materials(opts);

    const double idler_nm = pm::idler_wavelength(pump_nm, signal_nm);
    const double solved = pm::solve_poling_period(registry, signal_nm, pump_nm, temperature_c,
                                                  material);
    ordered_json doc;
    doc["material"] = material;
    doc["pump_nm"] = pump_nm;
    doc["signal_nm"] = signal_nm;
    doc["idler_nm"] = idler_nm;
    doc["temperature_c"] = temperature_c;
    doc["solved_period_um"] = solved;

    pm::QpmConfig cfg = pm::QpmConfig::make(pump_nm, signal_nm,
                                            period_um.value_or(solved), length_mm,
                                            temperature_c, material);
    doc["period_um"] = cfg.poling_period_um;
    doc["length_mm"] = length_mm;
    const double dk = pm::qpm_mismatch(registry, cfg);
    doc["mismatch_per_m"] = dk;
    doc["mismatch_half_arg_rad"] = 0.5 * dk * length_mm * 1e-3;
    emit_doc(opts, "pm.json", doc);

    if (scan_from && scan_to) {
        if (scan_points < 2) throw entsim::ParseError("pm: --scan-points must be >= 2");
        std::vector<double> grid(static_cast<std::size_t>(scan_points));
        for (int i = 0; i < scan_points; ++i) {
            grid[static_cast<std::size_t>(i)] =
                *scan_from + (*scan_to - *scan_from) * i / (scan_points - 1);
        }
        const auto spectrum = pm::pm_spectrum(registry, cfg, grid);
        TableWriter table({"signal_nm", "intensity"}, opts.summary);
        for (const auto& p : spectrum) table.row({p.signal_nm, p.intensity});
        emit(opts, "pm_spectrum.tsv", table.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-crystal QPM entanglement source calculator"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* scan_cmd = app.add_subcommand("coherence-scan",
                                        "visibility V = 2|rho1122| versus crystal length");
    add_common(scan_cmd, opts, true);

    auto* map_cmd = app.add_subcommand("compensation-map",
                                       "visibility over (length, plate thickness) grid "
                                       "plus per-length optimum ridge");
    add_common(map_cmd, opts, true);

    auto* metrics_cmd = app.add_subcommand("metrics",
                                           "entanglement metrics of a density-matrix fixture");
    std::string fixture_path;
    int sample_counts = 0;
    metrics_cmd->add_option("--fixture", fixture_path, "density-matrix fixture file")
        ->required();
    metrics_cmd->add_option("--sample-counts", sample_counts,
                            "run a Poisson-sampled tomography round trip with this many "
                            "counts per setting");
    add_common(metrics_cmd, opts, false);

    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH statistics from visibilities or S");
    std::optional<double> v_hv, v_da, r_max, t_r, s_m, x_in;
    chsh_cmd->add_option("--v-hv", v_hv, "visibility in the H/V basis");
    chsh_cmd->add_option("--v-da", v_da, "visibility in the D/A basis");
    chsh_cmd->add_option("--r-max", r_max, "peak coincidence rate [1/s]");
    chsh_cmd->add_option("--t-r", t_r, "integration time [s]");
    chsh_cmd->add_option("--s-m", s_m, "measured S value");
    chsh_cmd->add_option("--x", x_in, "violation speed [1/sqrt(s)] if known");
    add_common(chsh_cmd, opts, false);

    auto* rates_cmd = app.add_subcommand("rates", "derived columns of the rates table fixture");
    std::string rates_fixture;
    rates_cmd->add_option("--fixture", rates_fixture, "rates table fixture (TSV)")->required();
    add_common(rates_cmd, opts, false);

    auto* pm_cmd = app.add_subcommand("pm", "phase-matching: period solve and spectrum");
    std::string pm_material = "KTP";
    double pump_nm = 532.0, signal_nm = 810.0, temperature_c = 25.0, length_mm = 4.5;
    std::optional<double> period_um, scan_from, scan_to;
    int scan_points = 501;
    pm_cmd->add_option("--material", pm_material, "crystal material name");
    pm_cmd->add_option("--pump", pump_nm, "pump wavelength [nm]");
    pm_cmd->add_option("--signal", signal_nm, "signal wavelength [nm]");
    pm_cmd->add_option("--temperature", temperature_c, "crystal temperature [C]");
    pm_cmd->add_option("--period", period_um, "poling period [um] (default: solved)");
    pm_cmd->add_option("--length", length_mm, "crystal length [mm]");
    pm_cmd->add_option("--scan-from", scan_from, "spectrum grid start [nm]");
    pm_cmd->add_option("--scan-to", scan_to, "spectrum grid end [nm]");
    pm_cmd->add_option("--scan-points", scan_points, "spectrum grid size");
    add_common(pm_cmd, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (scan_cmd->parsed()) return run_coherence_scan(opts);
        if (map_cmd->parsed()) return run_compensation_map(opts);
        if (metrics_cmd->parsed()) return run_metrics(opts, fixture_path, sample_counts);
        if (chsh_cmd->parsed()) return run_chsh(opts, v_hv, v_da, r_max, t_r, s_m, x_in);
        if (rates_cmd->parsed()) return run_rates(opts, rates_fixture);
        if (pm_cmd->parsed()) {
            return run_pm(opts, pm_material, pump_nm, signal_nm, temperature_c, period_um,
                          length_mm, scan_from, scan_to, scan_points);
        }
        std::cerr << "error: input: no subcommand\n";
        return 2;
    } catch (const entsim::NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 1;
    } catch (const entsim::SolverError& e) {
        std::cerr << "error: solver: " << e.what() << "\n";
        return 1;
    } catch (const entsim::Error& e) {
        std::cerr << "error: input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
