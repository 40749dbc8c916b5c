#pragma once

#include <map>
#include <string>
#include <string_view>

namespace thermoharvest {

/// Constants of the reduced-order absorber model.
struct OpticsCalibration {
    double n_eff = 1.4;
    double theta_ref_deg = 31.5;
    double gap_ref = 5e-9;           // m
    double gap_decay = 8e-9;         // m, e-folding length of the gap law
    double flare_exponent = 2.0;     // beta in (theta_ref / theta)^beta
    double rel_bandwidth_ref = 0.35; // FWHM / lambda_r at theta_ref
    double peak_absorptance = 0.85;
    double pitch = 9e-6;             // m, unit-cell period
    double anchor_enhancement = 9.8; // |E/E0|^2 of the reference design at the anchor wavelength
    double anchor_wavelength = 4.2e-6;
    double eta0 = 0.0;               // solved from the anchor
};

/// Constants of the two-node device network.
struct ThermalCalibration {
    double pdms_thickness = 10e-6;       // m, top encapsulation
    double substrate_thickness = 25e-6;  // m, polyimide between TE bottom and skin
    double textile_temp = 298.15;        // K, textile spreader reservoir
    double target_hot_temp = 314.95;     // K, also the radiation linearisation anchor
    double target_cold_temp = 302.05;    // K
    double anchor_intensity = 300.0;     // W/m^2
    double kappa = 0.0;                  // solved: hotspot concentration factor
    double textile_resistance = 0.0;     // K/W, solved: cold node -> textile
};

/// Spacer trade-off: hotspot power scales with t/(t + t0) * exp(-t / t_nf).
struct CouplingCalibration {
    double confinement_length = 15e-9;      // t0
    double near_field_decay_length = 180e-9; // t_nf
};

struct TegCalibration {
    std::string material = "bi2te3_thin_film";
    int legs_in_series = 2;
    double junction_density = 1.0e7;  // junctions / m^2
};

struct LedgerEntry {
    std::string provenance;  // "anchor", "derived" or "config"
    std::string note;
};

struct Calibration {
    std::string version;
    OpticsCalibration optics;
    ThermalCalibration thermal;
    CouplingCalibration coupling;
    TegCalibration teg;
    /// Provenance per dotted constant name, e.g. "optics.n_eff".
    std::map<std::string, LedgerEntry> provenance;
    /// Derived values as recorded in the ledger file (checked against a fresh solve).
    std::map<std::string, double> recorded_derived;
    bool solved = false;
};

/// Parses a calibration ledger document. Unknown constant names are rejected.
/// The derived constants are *not* taken from the document; call
/// `calibrate()` (pipeline.hpp) to solve them.
Calibration parse_calibration(std::string_view json_text);

Calibration load_calibration(const std::string& path);

/// The ledger shipped in data/calibration.json, unsolved.
Calibration builtin_calibration_unsolved();

/// Serialises the ledger including the current derived values.
std::string calibration_to_json(const Calibration& cal);

}  // namespace thermoharvest
