#include "entsim/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "entsim/errors.hpp"

namespace entsim::io {

namespace {

using nlohmann::json;

std::vector<double> parse_grid(const json& node, const std::string& what) {
    std::vector<double> values;
    if (node.is_array()) {
        values = node.get<std::vector<double>>();
    } else if (node.is_object()) {
        const double from = node.at("from").get<double>();
        const double to = node.at("to").get<double>();
        const int count = node.at("count").get<int>();
        if (count < 1) throw ParseError(what + ": grid count must be >= 1");
        if (count == 1) {
            values.push_back(from);
        } else {
            for (int i = 0; i < count; ++i) {
                values.push_back(from + (to - from) * i / (count - 1));
            }
        }
    } else {
        throw ParseError(what + ": expected array or {from, to, count}");
    }
    if (values.empty()) throw ParseError(what + ": empty grid");
    return values;
}

coherence::FilterSpec parse_filter(const json& node) {
    return {node.at("center_nm").get<double>(), node.at("fwhm_nm").get<double>()};
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("scenario '" + path + "': " + e.what());
    }

    try {
        Scenario sc;
        sc.schema_version = doc.at("schema_version").get<int>();
        if (sc.schema_version != 1) {
            throw ParseError("scenario '" + path + "': unsupported schema_version " +
                             std::to_string(sc.schema_version));
        }

        const auto& cr = doc.at("crystal");
        auto& q = sc.source.crystal;
        q.pump_nm = cr.at("pump_nm").get<double>();
        q.signal_nm = cr.at("signal_nm").get<double>();
        if (cr.contains("idler_nm") && cr["idler_nm"].is_number()) {
            q.idler_nm = cr["idler_nm"].get<double>();
        } else {
            q.idler_nm = phasematch::idler_wavelength(q.pump_nm, q.signal_nm);
        }
        q.poling_period_um = cr.value("poling_period_um", 1.0);
        q.length_mm = cr.at("length_mm").get<double>();
        q.temperature_c = cr.at("temperature_c").get<double>();
        q.material = cr.at("material").get<std::string>();
        q.validate();

        sc.source.signal_filter = parse_filter(doc.at("signal_filter"));
        sc.source.idler_filter = parse_filter(doc.at("idler_filter"));

        if (doc.contains("plate")) {
            const auto& pl = doc["plate"];
            coherence::PlateSpec plate;
            plate.material = pl.at("material").get<std::string>();
            plate.thickness_mm = pl.value("thickness_mm", 0.0);
            plate.arm = coherence::arm_from_string(pl.value("arm", std::string("idler")));
            plate.temperature_c = pl.value("temperature_c", 20.0);
            sc.source.plate = plate;
        }

        if (doc.contains("integration")) {
            const auto& ic = doc["integration"];
            sc.source.integration.half_width_sigmas =
                ic.value("half_width_sigmas", sc.source.integration.half_width_sigmas);
            sc.source.integration.rel_tol = ic.value("rel_tol", sc.source.integration.rel_tol);
            sc.source.integration.max_intervals =
                ic.value("max_intervals", sc.source.integration.max_intervals);
        }

        if (doc.contains("scan")) {
            const auto& scan = doc["scan"];
            if (scan.contains("lengths_mm")) {
                sc.lengths_mm = parse_grid(scan["lengths_mm"], "scan.lengths_mm");
            }
            if (scan.contains("plate_mm")) {
                sc.plate_mm = parse_grid(scan["plate_mm"], "scan.plate_mm");
            }
        }
        sc.source.validate();
        return sc;
    } catch (const json::exception& e) {
        throw ParseError("scenario '" + path + "': " + e.what());
    }
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace entsim::io
