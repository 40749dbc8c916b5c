#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

namespace thermoharvest {

inline constexpr std::size_t kDesignVariableCount = 9;

/// Geometric design variables of one device. Lengths in meters, angle in degrees.
struct DesignPoint {
    double arm_length_1 = 0.0;  // NIR group (shortest)
    double arm_length_2 = 0.0;  // skin-emission group
    double arm_length_3 = 0.0;  // ambient-IR group (longest)
    double flare_angle = 0.0;
    double gap = 0.0;
    double metal_thickness = 0.0;
    double spacer_thickness = 0.0;
    double te_height = 0.0;
    double te_width = 0.0;

    using Vector = std::array<double, kDesignVariableCount>;

    /// Order matches the dataset CSV columns.
    [[nodiscard]] Vector to_vector() const noexcept;
    static DesignPoint from_vector(const Vector& v) noexcept;

    /// t_metal + t_spacer + h_TE.
    [[nodiscard]] double device_thickness() const noexcept {
        return metal_thickness + spacer_thickness + te_height;
    }

    bool operator==(const DesignPoint&) const = default;
};

/// CSV column names of the design variables, in DesignPoint::to_vector order.
const std::array<std::string_view, kDesignVariableCount>& design_column_names();

/// Index of a design variable by its CSV column name; throws LookupError.
std::size_t design_variable_index(std::string_view column_name);

/// Per-variable closed intervals of the sampled design space.
struct DesignBounds {
    std::array<std::pair<double, double>, kDesignVariableCount> ranges{};

    /// Throws ArgumentError unless min < max for every variable and the arm
    /// ranges are disjoint and ascending.
    void validate() const;
    [[nodiscard]] bool contains(const DesignPoint& d) const noexcept;
    [[nodiscard]] DesignPoint clip(const DesignPoint& d) const noexcept;
};

/// Reference device: resonances at 1.2 / 4.2 / 10.6 um for n_eff = 1.4,
/// 31.5 deg flare, 5 nm gap, and TE legs sized for a 12 ohm pair.
DesignPoint default_design();

/// Box used for sampling and optimisation. Arm ranges cover the three target
/// bands (0.8-2, 3-5, 8-12 um) at n_eff = 1.4.
DesignBounds default_bounds();

/// Physical sanity envelope for evaluation (wider than the sampling box, so
/// sweeps may leave it). Throws DomainError naming the offending variable.
void validate_design(const DesignPoint& d);

}  // namespace thermoharvest
