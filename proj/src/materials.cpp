#include "thermoharvest/materials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "embedded_data.hpp"
#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kSpeedOfLightCmPerS = 2.99792458e10;

// Table 1 envelope for the thin-film Bi2Te3/Sb2Te3 record.
constexpr double kSeebeckMin = 210e-6, kSeebeckMax = 220e-6;
constexpr double kKappaMin = 1.2, kKappaMax = 1.5;
constexpr double kSigmaMin = 0.8e5, kSigmaMax = 1.2e5;

TeMaterial make_bi2te3() {
    const TeMaterial m{210e-6, 1.35, 1.0e5};
    if (m.seebeck < kSeebeckMin || m.seebeck > kSeebeckMax || m.thermal_conductivity < kKappaMin ||
        m.thermal_conductivity > kKappaMax || m.electrical_conductivity < kSigmaMin ||
        m.electrical_conductivity > kSigmaMax) {
        throw ConfigError("built-in bi2te3_thin_film record outside its literature property range");
    }
    return m;
}

struct LayerRecord {
    std::string_view id;
    ThermalLayerProps props;
};

// Room-temperature handbook values; the polymer and oxide entries are
// configuration, not measurements of the actual films.
const std::array<LayerRecord, 6>& layer_registry() {
    static const std::array<LayerRecord, 6> registry{{
        {"pdms", {965.0, 1460.0, 0.15}},
        {"aluminum", {2700.0, 900.0, 237.0}},
        {"sio2", {2200.0, 740.0, 1.4}},
        {"al2o3", {3950.0, 880.0, 25.0}},
        {"te_film", {7700.0, 154.0, te_properties("bi2te3_thin_film").thermal_conductivity}},
        {"polyimide", {1420.0, 1090.0, 0.12}},
    }};
    return registry;
}

}  // namespace

PermittivityTable::PermittivityTable(std::string material_id, std::vector<PermittivityEntry> entries)
    : id_(std::move(material_id)), entries_(std::move(entries)) {
    if (entries_.size() < 2) {
        throw ArgumentError("permittivity table '" + id_ + "' needs at least two entries");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!std::isfinite(e.wavelength) || !std::isfinite(e.eps_real) || !std::isfinite(e.eps_imag)) {
            throw ArgumentError("permittivity table '" + id_ + "' has a non-finite entry");
        }
        if (e.eps_imag < 0.0) {
            throw ArgumentError("permittivity table '" + id_ + "' has negative eps_imag at " +
                                format_double(e.wavelength) + " m");
        }
        if (i > 0 && !(e.wavelength > entries_[i - 1].wavelength)) {
            throw ArgumentError("permittivity table '" + id_ + "' wavelengths must be strictly ascending");
        }
    }
}

PermittivityTable PermittivityTable::from_csv(std::string material_id, std::istream& in) {
    std::string line;
    bool header_seen = false;
    std::vector<PermittivityEntry> entries;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != "wavelength_m,eps_real,eps_imag") {
                throw ArgumentError("permittivity CSV header must be 'wavelength_m,eps_real,eps_imag', got '" +
                                    line + "'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            throw ArgumentError("malformed permittivity row '" + line + "'");
        }
        try {
            entries.push_back({std::stod(a), std::stod(b), std::stod(c)});
        } catch (const std::exception&) {
            throw ArgumentError("non-numeric permittivity row '" + line + "'");
        }
    }
    if (!header_seen) {
        throw ArgumentError("permittivity CSV is empty");
    }
    return PermittivityTable(std::move(material_id), std::move(entries));
}

Permittivity PermittivityTable::at(double wavelength) const {
    if (!(wavelength >= min_wavelength() && wavelength <= max_wavelength())) {
        throw RangeError("wavelength " + format_double(wavelength) + " m outside table '" + id_ + "' range [" +
                         format_double(min_wavelength()) + ", " + format_double(max_wavelength()) + "] m");
    }
    auto hi = std::lower_bound(entries_.begin(), entries_.end(), wavelength,
                               [](const PermittivityEntry& e, double w) { return e.wavelength < w; });
    if (hi->wavelength == wavelength) {
        return {hi->eps_real, hi->eps_imag};
    }
    auto lo = hi - 1;
    const double t = (wavelength - lo->wavelength) / (hi->wavelength - lo->wavelength);
    return {lo->eps_real + t * (hi->eps_real - lo->eps_real),
            std::max(0.0, lo->eps_imag + t * (hi->eps_imag - lo->eps_imag))};
}

const PermittivityTable& aluminum_permittivity() {
    static const PermittivityTable table = [] {
        std::istringstream in(embedded::kAluminumPermittivityCsv);
        return PermittivityTable::from_csv("aluminum", in);
    }();
    return table;
}

Permittivity drude_permittivity(const DrudeParams& p, double angular_freq) {
    if (!(angular_freq > 0.0)) {
        throw DomainError("Drude permittivity needs a positive angular frequency");
    }
    if (!(p.plasma_freq > 0.0) || !(p.damping > 0.0)) {
        throw DomainError("Drude parameters need positive plasma frequency and damping");
    }
    const double wp2 = p.plasma_freq * p.plasma_freq;
    const double denom = angular_freq * angular_freq + p.damping * p.damping;
    return {p.eps_inf - wp2 / denom, wp2 * p.damping / (angular_freq * denom)};
}

DrudeParams aluminum_drude() {
    constexpr double to_rad = 2.0 * 3.14159265358979323846 * kSpeedOfLightCmPerS;
    return {1.0, 1.19e5 * to_rad, 660.0 * to_rad};
}

TeMaterial te_properties(std::string_view material_id) {
    if (material_id == "bi2te3_thin_film") {
        static const TeMaterial bi2te3 = make_bi2te3();
        return bi2te3;
    }
    throw LookupError("unknown thermoelectric material '" + std::string(material_id) +
                      "'; known: bi2te3_thin_film");
}

ThermalLayerProps layer_thermal_properties(std::string_view layer_id) {
    for (const auto& rec : layer_registry()) {
        if (rec.id == layer_id) {
            return rec.props;
        }
    }
    std::string known;
    for (const auto& rec : layer_registry()) {
        known += (known.empty() ? "" : ", ") + std::string(rec.id);
    }
    throw LookupError("unknown thermal layer '" + std::string(layer_id) + "'; known: " + known);
}

std::vector<std::string> known_layer_ids() {
    std::vector<std::string> ids;
    for (const auto& rec : layer_registry()) {
        ids.emplace_back(rec.id);
    }
    return ids;
}

}  // namespace thermoharvest
