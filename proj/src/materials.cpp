#include "entsim/materials.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "entsim/errors.hpp"

namespace entsim::materials {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void check_range(const std::string& what, double value, const std::array<double, 2>& range,
                 const std::string& model_name) {
    if (!(value >= range[0] && value <= range[1])) {
        std::ostringstream os;
        os << model_name << ": " << what << " " << value << " outside validity range ["
           << range[0] << ", " << range[1] << "]";
        throw RangeError(os.str());
    }
}

// n^2 and d(n^2)/dl for the athermal part of the model, l in um.
std::pair<double, double> n_squared_and_slope(const SellmeierModel& m, double l) {
    const auto& c = m.coefficients;
    switch (m.form) {
        case SellmeierForm::Constant:
            return {c[0] * c[0], 0.0};
        case SellmeierForm::SellmeierRatio: {
            const double l2 = l * l;
            double n2 = c[0] + c[1] * l2;
            double slope = 2.0 * c[1] * l;
            for (std::size_t i = 2; i + 1 < c.size(); i += 2) {
                const double b = c[i], p = c[i + 1];
                const double den = l2 - p;
                n2 += b * l2 / den;
                slope += -2.0 * l * b * p / (den * den);
            }
            return {n2, slope};
        }
        case SellmeierForm::PoleSum: {
            const double l2 = l * l;
            double n2 = c[0];
            double slope = 0.0;
            for (std::size_t i = 1; i + 1 < c.size(); i += 2) {
                const double b = c[i], p = c[i + 1];
                const double den = l2 - p;
                n2 += b / den;
                slope += -2.0 * l * b / (den * den);
            }
            return {n2, slope};
        }
    }
    throw ValidationError("unknown functional form");
}

// dn/dT and its wavelength derivative at l (um).
std::pair<double, double> thermal_and_slope(const ThermalModel& th, double l) {
    const auto& a = th.dn_dt;
    const double f = a[0] + a[1] / l + a[2] / (l * l) + a[3] / (l * l * l);
    const double fp = -a[1] / (l * l) - 2.0 * a[2] / (l * l * l) - 3.0 * a[3] / (l * l * l * l);
    return {f, fp};
}

}  // namespace

Axis axis_from_string(const std::string& s) {
    const std::string v = lower(s);
    if (v == "x") return Axis::X;
    if (v == "y") return Axis::Y;
    if (v == "z") return Axis::Z;
    if (v == "o" || v == "ordinary") return Axis::Ordinary;
    if (v == "e" || v == "extraordinary") return Axis::Extraordinary;
    throw ParseError("unknown axis '" + s + "'");
}

std::string to_string(Axis axis) {
    switch (axis) {
        case Axis::X: return "X";
        case Axis::Y: return "Y";
        case Axis::Z: return "Z";
        case Axis::Ordinary: return "ordinary";
        case Axis::Extraordinary: return "extraordinary";
    }
    return "?";
}

SellmeierForm form_from_string(const std::string& s) {
    const std::string v = lower(s);
    if (v == "constant") return SellmeierForm::Constant;
    if (v == "sellmeier_ratio") return SellmeierForm::SellmeierRatio;
    if (v == "pole_sum") return SellmeierForm::PoleSum;
    throw ParseError("unknown functional form tag '" + s + "'");
}

std::string to_string(SellmeierForm form) {
    switch (form) {
        case SellmeierForm::Constant: return "constant";
        case SellmeierForm::SellmeierRatio: return "sellmeier_ratio";
        case SellmeierForm::PoleSum: return "pole_sum";
    }
    return "?";
}

void SellmeierModel::validate() const {
    const auto n = coefficients.size();
    bool ok = false;
    switch (form) {
        case SellmeierForm::Constant: ok = (n == 1); break;
        case SellmeierForm::SellmeierRatio: ok = (n >= 2 && n % 2 == 0); break;
        case SellmeierForm::PoleSum: ok = (n >= 3 && n % 2 == 1); break;
    }
    if (!ok) {
        throw ValidationError(name + "/" + to_string(axis) + ": coefficient count " +
                              std::to_string(n) + " does not fit form " + to_string(form));
    }
    if (!(wavelength_range_um[0] > 0.0 && wavelength_range_um[1] > wavelength_range_um[0])) {
        throw ValidationError(name + "/" + to_string(axis) + ": bad wavelength range");
    }
    if (!(temperature_range_c[1] > temperature_range_c[0])) {
        throw ValidationError(name + "/" + to_string(axis) + ": bad temperature range");
    }
}

double refractive_index(const SellmeierModel& model, double lambda_um, double temp_c) {
    check_range("wavelength [um]", lambda_um, model.wavelength_range_um, model.name);
    check_range("temperature [C]", temp_c, model.temperature_range_c, model.name);
    auto [n2, slope] = n_squared_and_slope(model, lambda_um);
    (void)slope;
    if (!(n2 > 0.0)) {
        throw NumericalError(model.name + ": n^2 <= 0 at " + std::to_string(lambda_um) + " um");
    }
    double n = std::sqrt(n2);
    if (model.thermal) {
        auto [f, fp] = thermal_and_slope(*model.thermal, lambda_um);
        (void)fp;
        n += f * (temp_c - model.thermal->t_ref_c);
    }
    if (!(std::isfinite(n) && n >= 1.0 - 1e-12)) {
        throw NumericalError(model.name + ": index " + std::to_string(n) + " below unity at " +
                             std::to_string(lambda_um) + " um");
    }
    return n;
}

double group_index(const SellmeierModel& model, double lambda_um, double temp_c) {
    // keep a small margin so the finite-difference oracle stays in range too
    const double margin = 1e-3;
    const std::array<double, 2> inner{model.wavelength_range_um[0] + margin,
                                      model.wavelength_range_um[1] - margin};
    if (model.form != SellmeierForm::Constant) {
        check_range("wavelength [um] (group)", lambda_um, inner, model.name);
    }
    check_range("temperature [C]", temp_c, model.temperature_range_c, model.name);

    auto [n2, slope] = n_squared_and_slope(model, lambda_um);
    if (!(n2 > 0.0)) {
        throw NumericalError(model.name + ": n^2 <= 0 at " + std::to_string(lambda_um) + " um");
    }
    const double n_base = std::sqrt(n2);
    double n = n_base;
    double dn_dl = slope / (2.0 * n_base);
    if (model.thermal) {
        auto [f, fp] = thermal_and_slope(*model.thermal, lambda_um);
        const double dt = temp_c - model.thermal->t_ref_c;
        n += f * dt;
        dn_dl += fp * dt;
    }
    const double ng = n - lambda_um * dn_dl;
    if (!std::isfinite(ng)) {
        throw NumericalError(model.name + ": non-finite group index");
    }
    return ng;
}

MaterialRegistry MaterialRegistry::from_models(std::vector<SellmeierModel> models) {
    MaterialRegistry reg;
    for (auto& m : models) {
        m.validate();
        const auto key = std::make_pair(m.name, m.axis);
        if (reg.models_.count(key) != 0) {
            throw ParseError("duplicate material entry " + m.name + "/" + to_string(m.axis));
        }
        reg.models_.emplace(key, std::move(m));
    }
    return reg;
}

const SellmeierModel& MaterialRegistry::lookup(const std::string& material, Axis axis) const {
    const auto it = models_.find(std::make_pair(material, axis));
    if (it == models_.end()) {
        throw LookupError("no dispersion model for " + material + "/" + to_string(axis));
    }
    return it->second;
}

bool MaterialRegistry::contains(const std::string& material, Axis axis) const {
    return models_.count(std::make_pair(material, axis)) != 0;
}

MaterialRegistry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open material file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return MaterialRegistry();  // empty file, empty registry
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("material file '" + path + "': " + e.what());
    }

    try {
        if (!doc.contains("models") || !doc["models"].is_array()) {
            throw ParseError("material file '" + path + "': missing 'models' array");
        }
        std::vector<SellmeierModel> models;
        std::size_t idx = 0;
        for (const auto& entry : doc["models"]) {
            SellmeierModel m;
            m.name = entry.at("material").get<std::string>();
            m.axis = axis_from_string(entry.at("axis").get<std::string>());
            m.form = form_from_string(entry.at("form").get<std::string>());
            m.coefficients = entry.at("coefficients").get<std::vector<double>>();
            m.wavelength_range_um = {entry.at("wavelength_range_um").at(0).get<double>(),
                                     entry.at("wavelength_range_um").at(1).get<double>()};
            m.temperature_range_c = {entry.at("temperature_range_c").at(0).get<double>(),
                                     entry.at("temperature_range_c").at(1).get<double>()};
            if (entry.contains("normal_dispersion_range_um")) {
                m.normal_dispersion_range_um = {
                    entry["normal_dispersion_range_um"].at(0).get<double>(),
                    entry["normal_dispersion_range_um"].at(1).get<double>()};
            } else {
                m.normal_dispersion_range_um = m.wavelength_range_um;
            }
            if (entry.contains("thermal")) {
                ThermalModel th;
                th.t_ref_c = entry["thermal"].at("t_ref_c").get<double>();
                const auto v = entry["thermal"].at("dn_dt").get<std::vector<double>>();
                if (v.size() != 4) {
                    throw ParseError("entry " + m.name + ": thermal dn_dt needs 4 coefficients");
                }
                std::copy(v.begin(), v.end(), th.dn_dt.begin());
                m.thermal = th;
            }
            if (entry.contains("source")) m.source = entry["source"].get<std::string>();
            ++idx;
            models.push_back(std::move(m));
        }
        (void)idx;
        return MaterialRegistry::from_models(std::move(models));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("material file '" + path + "': " + e.what());
    }
}

}  // namespace entsim::materials
