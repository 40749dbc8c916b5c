#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace thermoharvest {

struct Permittivity {
    double real = 0.0;
    double imag = 0.0;
};

struct PermittivityEntry {
    double wavelength = 0.0;  // m
    double eps_real = 0.0;
    double eps_imag = 0.0;
};

/// Tabulated complex permittivity, linearly interpolated in wavelength.
class PermittivityTable {
public:
    /// Entries must be strictly ascending in wavelength (at least two) and
    /// passive (eps_imag >= 0).
    PermittivityTable(std::string material_id, std::vector<PermittivityEntry> entries);

    /// Reads `wavelength_m,eps_real,eps_imag` CSV. Lines starting with '#' are skipped.
    static PermittivityTable from_csv(std::string material_id, std::istream& in);

    [[nodiscard]] Permittivity at(double wavelength) const;

    [[nodiscard]] const std::string& material_id() const noexcept { return id_; }
    [[nodiscard]] const std::vector<PermittivityEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] double min_wavelength() const noexcept { return entries_.front().wavelength; }
    [[nodiscard]] double max_wavelength() const noexcept { return entries_.back().wavelength; }

private:
    std::string id_;
    std::vector<PermittivityEntry> entries_;
};

/// The shipped aluminium table (data/aluminum_permittivity.csv, 0.8-14 um).
const PermittivityTable& aluminum_permittivity();

struct DrudeParams {
    double eps_inf = 1.0;
    double plasma_freq = 0.0;  // rad/s
    double damping = 0.0;      // rad/s
};

/// eps = eps_inf - wp^2 / (w^2 + i*w*gamma), split into real and imaginary parts.
Permittivity drude_permittivity(const DrudeParams& p, double angular_freq);

/// Free-electron fit for Al (wp = 1.19e5 cm^-1, gamma = 660 cm^-1).
DrudeParams aluminum_drude();

struct TeMaterial {
    double seebeck = 0.0;                  // V/K
    double thermal_conductivity = 0.0;     // W/(m K)
    double electrical_conductivity = 0.0;  // S/m
};

/// Registered thermoelectric materials. Currently only "bi2te3_thin_film".
TeMaterial te_properties(std::string_view material_id);

struct ThermalLayerProps {
    double density = 0.0;        // kg/m^3
    double specific_heat = 0.0;  // J/(kg K)
    double conductivity = 0.0;   // W/(m K)
};

/// One of: pdms, aluminum, sio2, al2o3, te_film, polyimide.
ThermalLayerProps layer_thermal_properties(std::string_view layer_id);

std::vector<std::string> known_layer_ids();

}  // namespace thermoharvest
