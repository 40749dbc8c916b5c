#include "thermoharvest/design.hpp"

#include <algorithm>
#include <cmath>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kNeffDefault = 1.4;

constexpr double arm_for(double resonance) { return resonance / (2.0 * kNeffDefault); }

}  // namespace

DesignPoint::Vector DesignPoint::to_vector() const noexcept {
    return {arm_length_1,     arm_length_2, arm_length_3, flare_angle, gap, metal_thickness,
            spacer_thickness, te_height,    te_width};
}

DesignPoint DesignPoint::from_vector(const Vector& v) noexcept {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

const std::array<std::string_view, kDesignVariableCount>& design_column_names() {
    static const std::array<std::string_view, kDesignVariableCount> names{
        "arm1_m", "arm2_m", "arm3_m", "flare_deg", "gap_m", "tmetal_m", "tspacer_m", "hte_m", "wte_m"};
    return names;
}

std::size_t design_variable_index(std::string_view column_name) {
    const auto& names = design_column_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == column_name) {
            return i;
        }
    }
    throw LookupError("unknown design variable '" + std::string(column_name) + "'");
}

void DesignBounds::validate() const {
    const auto& names = design_column_names();
    for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
        const auto [lo, hi] = ranges[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw ArgumentError("bounds for '" + std::string(names[i]) + "' need min < max, got [" +
                                format_double(lo) + ", " + format_double(hi) + "]");
        }
        if (!(lo > 0.0)) {
            throw ArgumentError("bounds for '" + std::string(names[i]) + "' must be positive");
        }
    }
    if (!(ranges[0].second < ranges[1].first) || !(ranges[1].second < ranges[2].first)) {
        throw ArgumentError("arm length ranges must be disjoint and ascending (arm1 < arm2 < arm3)");
    }
}

bool DesignBounds::contains(const DesignPoint& d) const noexcept {
    const auto v = d.to_vector();
    for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
        if (!(v[i] >= ranges[i].first && v[i] <= ranges[i].second)) {
            return false;
        }
    }
    return true;
}

DesignPoint DesignBounds::clip(const DesignPoint& d) const noexcept {
    auto v = d.to_vector();
    for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
        v[i] = std::clamp(v[i], ranges[i].first, ranges[i].second);
    }
    return DesignPoint::from_vector(v);
}

DesignPoint default_design() {
    DesignPoint d;
    d.arm_length_1 = arm_for(1.2e-6);
    d.arm_length_2 = arm_for(4.2e-6);
    d.arm_length_3 = arm_for(10.6e-6);
    d.flare_angle = 31.5;
    d.gap = 5e-9;
    d.metal_thickness = 50e-9;
    d.spacer_thickness = 45e-9;
    d.te_height = 10e-6;
    // Square legs, two in series, sigma = 1e5 S/m: R_int = 2 h / (sigma w^2) = 12 ohm.
    d.te_width = std::sqrt(2.0 * d.te_height / (1.0e5 * 12.0));
    return d;
}

DesignBounds default_bounds() {
    DesignBounds b;
    b.ranges = {{
        {arm_for(0.8e-6), arm_for(2.0e-6)},
        {arm_for(3.0e-6), arm_for(5.0e-6)},
        {arm_for(8.0e-6), arm_for(12.0e-6)},
        {25.0, 40.0},
        {2e-9, 20e-9},
        {40e-9, 60e-9},
        {30e-9, 60e-9},
        {5e-6, 10e-6},
        {2e-6, 20e-6},
    }};
    return b;
}

void validate_design(const DesignPoint& d) {
    const auto v = d.to_vector();
    const auto& names = design_column_names();
    for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
        if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
            throw DomainError("design variable '" + std::string(names[i]) + "' must be positive and finite, got " +
                              format_double(v[i]));
        }
    }
    if (!(d.arm_length_1 <= d.arm_length_2 && d.arm_length_2 <= d.arm_length_3)) {
        throw DomainError("arm lengths must be ascending (arm1 <= arm2 <= arm3)");
    }
    if (d.flare_angle < 20.0 || d.flare_angle > 45.0) {
        throw DomainError("flare_deg " + format_double(d.flare_angle) + " outside [20, 45] deg");
    }
    if (d.gap < 1e-9 || d.gap > 5e-8) {
        throw DomainError("gap_m " + format_double(d.gap) + " outside [1e-9, 5e-8] m");
    }
    if (d.te_height < 1e-6 || d.te_height > 5e-5) {
        throw DomainError("hte_m " + format_double(d.te_height) + " outside [1e-6, 5e-5] m");
    }
}

}  // namespace thermoharvest
