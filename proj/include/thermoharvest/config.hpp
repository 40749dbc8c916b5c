#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "thermoharvest/design.hpp"
#include "thermoharvest/moo.hpp"
#include "thermoharvest/optics.hpp"
#include "thermoharvest/thermal.hpp"

namespace thermoharvest {

struct SamplerSettings {
    std::size_t samples = 500;
};

struct GprSettings {
    std::vector<std::string> targets{"dT_K", "pout_W"};
    std::size_t folds = 5;
    std::size_t restarts = 2;
    double noise_variance = 1e-8;
    std::size_t max_evaluations = 500;
    std::size_t max_tune_rows = 200;
};

struct SweepSettings {
    std::string variable = "gap_m";
    double min = 2e-9;
    double max = 20e-9;
    std::size_t points = 19;
    bool log_spacing = false;
};

struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t workers = 0;  // 0: THERMOHARVEST_WORKERS, else 1
    std::filesystem::path output_dir = "thermoharvest_out";
    std::filesystem::path calibration_path;  // empty: the shipped ledger
    DesignPoint design = default_design();
    DesignBounds bounds = default_bounds();
    Environment environment;
    IncidentSpectrum incident = default_incident();
    SamplerSettings sampler;
    GprSettings gpr;
    NsgaConfig nsga;
    SweepSettings sweep;

    /// One line per setting: "default <key> = <value>" or "set <key> = <value>".
    std::vector<std::string> provenance_log;
    std::vector<std::string> warnings;
};

/// Strict JSON config: unknown keys are rejected by their dotted path,
/// omitted keys take defaults (each echoed in `provenance_log`). Relative
/// paths resolve against `base_dir`.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// The shipped ledger, or the one named by the config, solved.
Calibration resolve_calibration(const RunConfig& config);

}  // namespace thermoharvest
