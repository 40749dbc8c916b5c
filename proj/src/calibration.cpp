#include "thermoharvest/calibration.hpp"

#include <json.hpp>

#include <functional>
#include <set>
#include <vector>

#include "embedded_data.hpp"
#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

using nlohmann::json;

constexpr std::string_view kLedgerFormat = "thermoharvest-calibration";

struct NumericSlot {
    std::string_view name;
    std::function<double&(Calibration&)> ref;
    bool derived = false;
};

const std::vector<NumericSlot>& numeric_slots() {
    static const std::vector<NumericSlot> slots{
        {"optics.n_eff", [](Calibration& c) -> double& { return c.optics.n_eff; }},
        {"optics.theta_ref_deg", [](Calibration& c) -> double& { return c.optics.theta_ref_deg; }},
        {"optics.gap_ref_m", [](Calibration& c) -> double& { return c.optics.gap_ref; }},
        {"optics.gap_decay_m", [](Calibration& c) -> double& { return c.optics.gap_decay; }},
        {"optics.flare_exponent", [](Calibration& c) -> double& { return c.optics.flare_exponent; }},
        {"optics.rel_bandwidth_ref", [](Calibration& c) -> double& { return c.optics.rel_bandwidth_ref; }},
        {"optics.peak_absorptance", [](Calibration& c) -> double& { return c.optics.peak_absorptance; }},
        {"optics.pitch_m", [](Calibration& c) -> double& { return c.optics.pitch; }},
        {"optics.anchor_enhancement", [](Calibration& c) -> double& { return c.optics.anchor_enhancement; }},
        {"optics.anchor_wavelength_m", [](Calibration& c) -> double& { return c.optics.anchor_wavelength; }},
        {"optics.eta0", [](Calibration& c) -> double& { return c.optics.eta0; }, true},
        {"thermal.pdms_thickness_m", [](Calibration& c) -> double& { return c.thermal.pdms_thickness; }},
        {"thermal.substrate_thickness_m", [](Calibration& c) -> double& { return c.thermal.substrate_thickness; }},
        {"thermal.textile_temp_K", [](Calibration& c) -> double& { return c.thermal.textile_temp; }},
        {"thermal.target_hot_temp_K", [](Calibration& c) -> double& { return c.thermal.target_hot_temp; }},
        {"thermal.target_cold_temp_K", [](Calibration& c) -> double& { return c.thermal.target_cold_temp; }},
        {"thermal.anchor_intensity_W_m2", [](Calibration& c) -> double& { return c.thermal.anchor_intensity; }},
        {"thermal.kappa", [](Calibration& c) -> double& { return c.thermal.kappa; }, true},
        {"thermal.textile_resistance_K_W", [](Calibration& c) -> double& { return c.thermal.textile_resistance; },
         true},
        {"coupling.confinement_length_m", [](Calibration& c) -> double& { return c.coupling.confinement_length; }},
        {"coupling.near_field_decay_length_m",
         [](Calibration& c) -> double& { return c.coupling.near_field_decay_length; }},
        {"teg.junction_density_m2", [](Calibration& c) -> double& { return c.teg.junction_density; }},
    };
    return slots;
}

void require_positive(const Calibration& c) {
    auto copy = c;
    for (const auto& slot : numeric_slots()) {
        if (slot.derived) {
            continue;
        }
        if (!(slot.ref(copy) > 0.0)) {
            throw ConfigError("calibration constant '" + std::string(slot.name) + "' must be positive");
        }
    }
    if (c.optics.peak_absorptance > 1.0) {
        throw ConfigError("calibration constant 'optics.peak_absorptance' must lie in (0, 1]");
    }
    if (c.optics.n_eff < 1.0) {
        throw ConfigError("calibration constant 'optics.n_eff' must be >= 1");
    }
    if (c.teg.legs_in_series < 1 || c.teg.legs_in_series % 2 != 0) {
        throw ConfigError("calibration constant 'teg.legs_in_series' must be a positive even count");
    }
}

}  // namespace

Calibration parse_calibration(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("calibration ledger is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kLedgerFormat) {
        throw ConfigError("calibration ledger must be an object with format '" + std::string(kLedgerFormat) + "'");
    }
    if (!doc.contains("version") || !doc["version"].is_string()) {
        throw ConfigError("calibration ledger needs a string 'version'");
    }
    if (!doc.contains("constants") || !doc["constants"].is_object()) {
        throw ConfigError("calibration ledger needs a 'constants' object");
    }

    Calibration cal;
    cal.version = doc["version"].get<std::string>();
    std::set<std::string> seen;
    for (const auto& [name, entry] : doc["constants"].items()) {
        if (!entry.is_object() || !entry.contains("value")) {
            throw ConfigError("ledger constant '" + name + "' needs an object with a 'value'");
        }
        LedgerEntry meta{entry.value("provenance", std::string("config")), entry.value("note", std::string())};
        if (meta.provenance != "anchor" && meta.provenance != "derived" && meta.provenance != "config") {
            throw ConfigError("ledger constant '" + name + "' has unknown provenance '" + meta.provenance + "'");
        }
        bool matched = false;
        if (name == "teg.material") {
            cal.teg.material = entry["value"].get<std::string>();
            matched = true;
        } else if (name == "teg.legs_in_series") {
            cal.teg.legs_in_series = entry["value"].get<int>();
            matched = true;
        } else {
            for (const auto& slot : numeric_slots()) {
                if (slot.name == name) {
                    if (!entry["value"].is_number()) {
                        throw ConfigError("ledger constant '" + name + "' must be numeric");
                    }
                    const double v = entry["value"].get<double>();
                    if (slot.derived) {
                        cal.recorded_derived[name] = v;
                    } else {
                        slot.ref(cal) = v;
                    }
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            throw ConfigError("unknown calibration constant '" + name + "'");
        }
        seen.insert(name);
        cal.provenance[name] = std::move(meta);
    }
    for (const auto& slot : numeric_slots()) {
        if (!slot.derived && !seen.count(std::string(slot.name))) {
            throw ConfigError("calibration ledger is missing constant '" + std::string(slot.name) + "'");
        }
    }
    require_positive(cal);
    return cal;
}

Calibration load_calibration(const std::string& path) {
    return parse_calibration(read_text_file(path));
}

Calibration builtin_calibration_unsolved() {
    return parse_calibration(embedded::kCalibrationLedgerJson);
}

std::string calibration_to_json(const Calibration& cal) {
    json constants = json::object();
    auto copy = cal;
    auto annotate = [&](const std::string& name, json value) {
        json e{{"value", std::move(value)}};
        if (auto it = cal.provenance.find(name); it != cal.provenance.end()) {
            e["provenance"] = it->second.provenance;
            if (!it->second.note.empty()) {
                e["note"] = it->second.note;
            }
        }
        constants[name] = std::move(e);
    };
    for (const auto& slot : numeric_slots()) {
        annotate(std::string(slot.name), slot.ref(copy));
    }
    annotate("teg.material", cal.teg.material);
    annotate("teg.legs_in_series", cal.teg.legs_in_series);
    json doc{{"format", kLedgerFormat}, {"version", cal.version}, {"constants", constants}};
    return doc.dump(2) + "\n";
}

}  // namespace thermoharvest
