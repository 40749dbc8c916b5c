#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "thermoharvest/calibration.hpp"

namespace thermoharvest {

struct OracleCheck {
    std::string name;
    double error = 0.0;      // measured discrepancy, in the units the tolerance uses
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

/// Self-checks shipped with the tool: ledger consistency, anchor values,
/// series-resistance oracle, network vs finite-volume stack, steady energy
/// balance, GP interpolation and an exhaustive Pareto comparison.
std::vector<OracleCheck> run_oracle_suite(const Calibration& cal, std::uint64_t seed);

void write_validation_csv(std::ostream& os, const std::vector<OracleCheck>& checks, std::uint64_t seed,
                          const std::string& ledger);

}  // namespace thermoharvest
