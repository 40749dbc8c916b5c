#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include "thermoharvest/materials.hpp"
#include "thermoharvest/thermal.hpp"

namespace thermoharvest {

struct TeLegGeometry {
    double height = 0.0;  // m
    double width = 0.0;   // m, side of the square cross-section
    int legs_in_series = 2;

    void validate() const;
};

struct TegOutput {
    double open_circuit_voltage = 0.0;  // V
    double internal_resistance = 0.0;   // ohm
    double load_resistance = 0.0;       // ohm
    double current = 0.0;               // A
    double power = 0.0;                 // W
    double power_density = 0.0;         // W/m^2
};

struct CoupledOperatingPoint {
    double delta_T = 0.0;          // K
    double hot_temp = 0.0;         // K
    double cold_temp = 0.0;        // K
    double current_density = 0.0;  // A/m^2
    double heat_flux = 0.0;        // W/m^2 through the leg, conduction + Peltier
    TegOutput output;
    std::size_t iterations = 0;
};

/// V_oc = S * dT. Sign follows dT.
double open_circuit_voltage(double seebeck, double delta_T);

/// legs * h / (sigma * w^2).
double internal_resistance(const TeLegGeometry& geom, double electrical_conductivity);

/// V^2 R_L / (R_L + R_int)^2. An infinite load returns 0.
double load_power(double v_oc, double r_int, double r_load);

double matched_power(double v_oc, double r_int);

double power_density(double power_per_junction, double junction_density);

/// Leg width giving `r_target` for the given height, conductivity and leg count.
double width_for_resistance(double height, double electrical_conductivity, int legs, double r_target);

inline constexpr double kOpenCircuit = std::numeric_limits<double>::infinity();

struct CoupledOptions {
    double tol = 1e-9;  // K
    std::size_t max_iterations = 100;
    double junction_density = 1.0e7;
};

/// Fixed point between the thermal network and the load current. Each pass
/// solves the network, sets I = S dT / (R_L + R_int) and re-injects the
/// Peltier sink S T_hot I at the hot terminal, the Peltier source S T_cold I
/// at the cold terminal and half of I^2 R_int at each. Both terminals must be
/// internal nodes joined by an edge.
CoupledOperatingPoint coupled_operating_point(const ThermalNetwork& network, const TeMaterial& te,
                                              const TeLegGeometry& geom, double r_load,
                                              const CoupledOptions& options = {});

/// {delta_T_K, v_oc_V, r_int_ohm, r_load_ohm, current_A, power_W, power_density_W_m2}
std::string operating_point_json(const CoupledOperatingPoint& point);

}  // namespace thermoharvest
