#include "thermoharvest/teg.hpp"

#include <json.hpp>

#include <cmath>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

void TeLegGeometry::validate() const {
    if (!(height >= 1e-6 && height <= 5e-5)) {
        throw DomainError("TE leg height " + format_double(height) + " m outside [1e-6, 5e-5]");
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw DomainError("TE leg width must be positive");
    }
    if (legs_in_series < 1 || legs_in_series % 2 != 0) {
        throw DomainError("legs_in_series must be a positive even count");
    }
}

double open_circuit_voltage(double seebeck, double delta_T) {
    if (!(seebeck > 0.0)) {
        throw DomainError("Seebeck coefficient must be positive");
    }
    return seebeck * delta_T;
}

double internal_resistance(const TeLegGeometry& geom, double electrical_conductivity) {
    geom.validate();
    if (!(electrical_conductivity > 0.0)) {
        throw DomainError("electrical conductivity must be positive");
    }
    return static_cast<double>(geom.legs_in_series) * geom.height /
           (electrical_conductivity * geom.width * geom.width);
}

double load_power(double v_oc, double r_int, double r_load) {
    if (!(r_int > 0.0) || !(r_load > 0.0)) {
        throw DomainError("load_power needs positive resistances");
    }
    if (std::isinf(r_load)) {
        return 0.0;
    }
    const double total = r_load + r_int;
    return v_oc * v_oc * r_load / (total * total);
}

double matched_power(double v_oc, double r_int) {
    if (!(r_int > 0.0)) {
        throw DomainError("matched_power needs a positive internal resistance");
    }
    return v_oc * v_oc / (4.0 * r_int);
}

double power_density(double power_per_junction, double junction_density) {
    if (!(junction_density > 0.0)) {
        throw DomainError("junction density must be positive");
    }
    return power_per_junction * junction_density;
}

double width_for_resistance(double height, double electrical_conductivity, int legs, double r_target) {
    if (!(height > 0.0) || !(electrical_conductivity > 0.0) || legs < 1 || !(r_target > 0.0)) {
        throw DomainError("width_for_resistance needs positive inputs");
    }
    return std::sqrt(static_cast<double>(legs) * height / (electrical_conductivity * r_target));
}

CoupledOperatingPoint coupled_operating_point(const ThermalNetwork& network, const TeMaterial& te,
                                              const TeLegGeometry& geom, double r_load,
                                              const CoupledOptions& options) {
    if (!(options.tol > 0.0)) {
        throw ArgumentError("coupled solve tolerance must be positive");
    }
    if (options.max_iterations == 0) {
        throw ArgumentError("coupled solve needs at least one iteration");
    }
    if (!(r_load > 0.0)) {
        throw DomainError("load resistance must be positive");
    }
    const std::string hot = network.hot_terminal();
    const std::string cold = network.cold_terminal();
    if (!network.node_index(hot) || !network.node_index(cold)) {
        throw ArgumentError("coupled solve needs both terminals to be internal nodes");
    }
    const double r_thermal = network.resistance_between(hot, cold);
    const double r_int = internal_resistance(geom, te.electrical_conductivity);
    const double area = geom.width * geom.width;

    auto current_for = [&](double dT) {
        return std::isinf(r_load) ? 0.0 : te.seebeck * dT / (r_load + r_int);
    };

    double current = 0.0;
    double t_hot = 0.0;
    double t_cold = 0.0;
    double prev_dT = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        ThermalNetwork work = network;
        if (current != 0.0) {
            const double joule = 0.5 * current * current * r_int;
            work.add_source(hot, -te.seebeck * t_hot * current + joule);
            work.add_source(cold, te.seebeck * t_cold * current + joule);
        }
        const auto sol = solve_steady(work);
        const double next = current_for(sol.delta_T);
        residual = std::abs(sol.delta_T - prev_dT);
        const bool converged = (it > 1 && residual < options.tol) || (current == 0.0 && next == 0.0);
        current = next;
        t_hot = sol.hot_temp;
        t_cold = sol.cold_temp;
        prev_dT = sol.delta_T;
        if (!converged) {
            continue;
        }
        CoupledOperatingPoint p;
        p.delta_T = sol.delta_T;
        p.hot_temp = sol.hot_temp;
        p.cold_temp = sol.cold_temp;
        p.iterations = it;
        p.current_density = current / area;
        p.heat_flux = (sol.delta_T / r_thermal + te.seebeck * sol.hot_temp * current) / area;
        p.output.open_circuit_voltage = open_circuit_voltage(te.seebeck, sol.delta_T);
        p.output.internal_resistance = r_int;
        p.output.load_resistance = r_load;
        p.output.current = current;
        p.output.power = load_power(p.output.open_circuit_voltage, r_int, r_load);
        p.output.power_density = power_density(p.output.power, options.junction_density);
        return p;
    }
    throw ConvergenceError("coupled TE/thermal iteration did not converge in " +
                           std::to_string(options.max_iterations) + " iterations (last |d dT| = " +
                           format_double(residual) + " K)");
}

std::string operating_point_json(const CoupledOperatingPoint& point) {
    nlohmann::json doc{
        {"delta_T_K", point.delta_T},
        {"v_oc_V", point.output.open_circuit_voltage},
        {"r_int_ohm", point.output.internal_resistance},
        {"r_load_ohm", std::isinf(point.output.load_resistance) ? nlohmann::json(nullptr)
                                                                : nlohmann::json(point.output.load_resistance)},
        {"current_A", point.output.current},
        {"power_W", point.output.power},
        {"power_density_W_m2", point.output.power_density},
    };
    return doc.dump(2);
}

}  // namespace thermoharvest
