#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace entsim::materials {

enum class Axis { X, Y, Z, Ordinary, Extraordinary };

Axis axis_from_string(const std::string& s);
std::string to_string(Axis axis);

/// Functional form of the index model, selected by the data file's form tag.
///   Constant:       n = c0
///   SellmeierRatio: n^2 = c0 + c1*l^2 + sum_i Bi*l^2/(l^2 - Ci),  (Bi, Ci) = (c2,c3), (c4,c5), ...
///   PoleSum:        n^2 = c0 + sum_i Bi/(l^2 - Ci)
/// with l the vacuum wavelength in micrometers.
enum class SellmeierForm { Constant, SellmeierRatio, PoleSum };

SellmeierForm form_from_string(const std::string& s);
std::string to_string(SellmeierForm form);

/// Linear thermo-optic correction n(l,T) = n(l) + dn/dT(l) * (T - t_ref),
/// dn/dT(l) = a0 + a1/l + a2/l^2 + a3/l^3 in 1/degC.
struct ThermalModel {
    double t_ref_c = 20.0;
    std::array<double, 4> dn_dt{};  // a0, a1, a2, a3
};

struct SellmeierModel {
    std::string name;
    Axis axis = Axis::Z;
    SellmeierForm form = SellmeierForm::Constant;
    std::vector<double> coefficients;
    std::optional<ThermalModel> thermal;
    std::array<double, 2> wavelength_range_um{0.0, 0.0};
    std::array<double, 2> temperature_range_c{0.0, 0.0};
    std::array<double, 2> normal_dispersion_range_um{0.0, 0.0};
    std::string source;

    /// Throws ValidationError if the coefficient list does not fit the form.
    void validate() const;
};

/// Phase index n(l,T). Throws RangeError outside the model's validity ranges.
double refractive_index(const SellmeierModel& model, double lambda_um, double temp_c);

/// Group index n_g = n - l dn/dl from the analytic derivative of the form.
double group_index(const SellmeierModel& model, double lambda_um, double temp_c);

/// Immutable map from (material name, axis) to dispersion model.
class MaterialRegistry {
  public:
    MaterialRegistry() = default;

    /// Throws ParseError on duplicate (name, axis) keys.
    static MaterialRegistry from_models(std::vector<SellmeierModel> models);

    const SellmeierModel& lookup(const std::string& material, Axis axis) const;
    bool contains(const std::string& material, Axis axis) const;
    std::size_t size() const { return models_.size(); }

    const std::map<std::pair<std::string, Axis>, SellmeierModel>& models() const {
        return models_;
    }

  private:
    std::map<std::pair<std::string, Axis>, SellmeierModel> models_;
};

/// Loads the JSON material data file. An empty (whitespace-only) file yields
/// an empty registry; malformed documents throw ParseError with context.
MaterialRegistry load_registry(const std::string& path);

}  // namespace entsim::materials
