#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermoharvest/calibration.hpp"
#include "thermoharvest/design.hpp"
#include "thermoharvest/optics.hpp"
#include "thermoharvest/teg.hpp"
#include "thermoharvest/thermal.hpp"

namespace thermoharvest {

/// Hotspot power P_abs * t/(t + t0) * exp(-t / t_nf) delivered through a spacer of thickness t.
double hotspot_power(double absorbed_power, double spacer_thickness, const CouplingCalibration& coupling);

/// Solves the derived ledger constants (eta0, kappa, textile resistance) in
/// place against the reference design and environment, and marks the
/// calibration solved.
void calibrate(Calibration& cal, const Environment& env = {});

/// Shipped ledger, solved.
const Calibration& default_calibration();

/// Largest relative gap between the solved derived constants and the values
/// recorded in the ledger document (0 when they agree exactly).
double derived_mismatch(const Calibration& cal);

struct PerformanceMetrics {
    double max_enhancement = 0.0;  // |E/E0|^2
    double absorbed_power = 0.0;   // W per unit cell
    double delta_T_eff = 0.0;      // K, |T_hot - T_cold| at open circuit
    double v_oc = 0.0;             // V
    double p_out = 0.0;            // W per junction at matched load
    double device_thickness = 0.0; // m

    // Not part of the dataset columns.
    double hot_temp = 0.0;
    double cold_temp = 0.0;
    double internal_resistance = 0.0;

    bool operator==(const PerformanceMetrics&) const = default;
};

/// Optics -> hotspot power -> two-node network -> Seebeck output. Module
/// errors are rethrown with the design attached.
PerformanceMetrics evaluate_design(const DesignPoint& design, const Environment& env,
                                   const IncidentSpectrum& incident, const Calibration& cal);

/// Matched-load operating point including Peltier back-action.
CoupledOperatingPoint evaluate_operating_point(const DesignPoint& design, const Environment& env,
                                               const IncidentSpectrum& incident, const Calibration& cal);

/// Latin hypercube over a box: each of the n strata per dimension used once.
std::vector<std::vector<double>> latin_hypercube(std::span<const std::pair<double, double>> box, std::size_t n,
                                                 std::uint64_t seed);

std::vector<DesignPoint> sample_designs(const DesignBounds& bounds, std::size_t n, std::uint64_t seed);

struct Dataset {
    std::vector<DesignPoint> designs;
    std::vector<PerformanceMetrics> metrics;
    std::uint64_t seed = 0;
    DesignBounds bounds;
    std::string model_version;
    std::string ledger_version;
};

Dataset generate_dataset(const DesignBounds& bounds, std::size_t n, std::uint64_t seed, const Environment& env,
                         const IncidentSpectrum& incident, const Calibration& cal, std::size_t workers = 1);

/// Metric columns of the dataset CSV.
const std::vector<std::string>& metric_column_names();

/// Value of a metric column (e.g. "dT_K") for one row.
double metric_value(const PerformanceMetrics& m, std::string_view column);

void write_dataset_csv(std::ostream& os, const Dataset& dataset);
std::string dataset_sidecar_json(const Dataset& dataset);

/// Reads a dataset CSV (comment lines skipped). Seed and bounds are not part
/// of the CSV; the returned dataset carries the bounds of its own rows.
Dataset read_dataset_csv(std::istream& in);

/// Reads rows of design columns only (extra columns ignored).
std::vector<DesignPoint> read_design_csv(std::istream& in);

/// Evaluates `design` with one variable replaced by each of `values`.
std::vector<PerformanceMetrics> sweep_variable(const DesignPoint& design, std::string_view column,
                                               std::span<const double> values, const Environment& env,
                                               const IncidentSpectrum& incident, const Calibration& cal);

}  // namespace thermoharvest
