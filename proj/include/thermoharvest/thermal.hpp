#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thermoharvest/calibration.hpp"
#include "thermoharvest/design.hpp"
#include "thermoharvest/materials.hpp"

namespace thermoharvest {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)

struct Environment {
    double ambient_temp = 298.15;    // K
    double skin_temp = 306.15;       // K
    double convection_coeff = 10.0;  // W/(m^2 K)
    double emissivity = 0.9;

    void validate() const;
};

/// Linearised radiative film coefficient 4 eps sigma T_m^3.
double radiative_conductance(double emissivity, double mean_temp);

/// Lumped conduction network: internal nodes with heat capacity, fixed-temperature
/// reservoirs, resistive edges and point heat sources. Ids are shared between
/// nodes and reservoirs.
class ThermalNetwork {
public:
    struct Node {
        std::string id;
        double heat_capacity = 0.0;  // J/K
    };
    struct Reservoir {
        std::string id;
        double temp = 0.0;  // K
    };
    struct Edge {
        std::string a;
        std::string b;
        double resistance = 0.0;  // K/W
    };
    struct Source {
        std::string node;
        double power = 0.0;  // W
    };

    void add_node(std::string id, double heat_capacity);
    void add_reservoir(std::string id, double temp);
    void add_edge(std::string a, std::string b, double resistance);
    void add_source(std::string node, double power);
    /// Which two ids report as T_hot and T_cold. Defaults to the first and last node.
    void set_terminals(std::string hot, std::string cold);

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Reservoir>& reservoirs() const noexcept { return reservoirs_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<Source>& sources() const noexcept { return sources_; }
    [[nodiscard]] std::string hot_terminal() const;
    [[nodiscard]] std::string cold_terminal() const;

    /// Total resistance of the edges joining a and b (parallel combination).
    [[nodiscard]] double resistance_between(const std::string& a, const std::string& b) const;
    [[nodiscard]] std::optional<std::size_t> node_index(const std::string& id) const;
    [[nodiscard]] std::optional<std::size_t> reservoir_index(const std::string& id) const;

    /// Positive resistances, at least one reservoir, every node reaches a reservoir.
    void validate() const;

    [[nodiscard]] std::string to_json() const;

private:
    void check_new_id(const std::string& id) const;

    std::vector<Node> nodes_;
    std::vector<Reservoir> reservoirs_;
    std::vector<Edge> edges_;
    std::vector<Source> sources_;
    std::string hot_;
    std::string cold_;
};

struct ThermalSolution {
    std::map<std::string, double> node_temps;  // nodes and reservoirs
    std::vector<double> profile_z;             // stack solves only, m from the top surface
    std::vector<double> profile_temp;
    double hot_temp = 0.0;
    double cold_temp = 0.0;
    double delta_T = 0.0;
    double source_power = 0.0;      // W injected
    double boundary_outflow = 0.0;  // W leaving through reservoirs / boundaries
    double boundary_throughput = 0.0;  // W, sum of |flow| over every boundary

    /// |sources - outflow| / max(|sources|, boundary throughput, tiny).
    [[nodiscard]] double energy_residual() const noexcept;
};

/// Solves G T = b for the internal nodes. Throws SingularSystemError for a
/// node that cannot reach a reservoir.
ThermalSolution solve_steady(const ThermalNetwork& network);

struct TransientSample {
    double time = 0.0;
    ThermalSolution state;
};

/// Implicit Euler on C dT/dt = -G T + b from `initial` (per node, in node
/// order); by default every node starts at the first reservoir temperature.
std::vector<TransientSample> solve_transient(const ThermalNetwork& network, double t_end, double dt,
                                             std::optional<std::vector<double>> initial = std::nullopt);

/// 1 / (smallest generalised eigenvalue of G v = lambda C v).
double slowest_time_constant(const ThermalNetwork& network);

/// Resistances of the two-node device model for one design.
struct DeviceResistances {
    double top_loss = 0.0;     // hot -> ambient: PDMS + convection + linearised radiation
    double hot_to_cold = 0.0;  // spacer + TE leg
    double skin_path = 0.0;    // cold -> skin: substrate
    double textile = 0.0;      // cold -> textile (calibrated)
    double leg_area = 0.0;
    double cell_area = 0.0;
};

DeviceResistances device_resistances(const DesignPoint& design, const Environment& env, const Calibration& cal);

/// Two internal nodes ("hot", "cold") and three reservoirs ("ambient",
/// "textile", "skin"); kappa * hotspot_power is injected at "hot".
/// Requires a solved calibration.
ThermalNetwork build_network(const DesignPoint& design, const Environment& env, double hotspot_power,
                             const Calibration& cal);

struct BoundaryCondition {
    enum class Kind { Fixed, Convective };
    Kind kind = Kind::Fixed;
    double temp = 0.0;  // K, surface temperature (Fixed) or far-field temperature (Convective)
    double h = 0.0;     // W/(m^2 K), Convective only

    static BoundaryCondition fixed(double t) { return {Kind::Fixed, t, 0.0}; }
    static BoundaryCondition convective(double t, double film) { return {Kind::Convective, t, film}; }
};

struct StackLayer {
    std::string layer_id;
    double thickness = 0.0;  // m
    ThermalLayerProps props;
    double source_density = 0.0;  // W/m^3
};

/// Layers ordered top (index 0) to bottom; 1-D conduction through `area`.
struct StackModel {
    std::vector<StackLayer> layers;
    double area = 0.0;
    BoundaryCondition top_bc;
    BoundaryCondition bottom_bc;
    /// Layer whose top and bottom faces report as hot and cold.
    std::size_t te_layer = 0;

    void validate() const;
};

/// Steady finite-volume solve with n_cells per layer and harmonic-mean face
/// conductances. Profile holds the top surface, every cell centre and the
/// bottom surface.
ThermalSolution stack_fd_profile(const StackModel& stack, std::size_t n_cells);

/// flux * (sum t_i / k_i + 1/h for each convective boundary). Source-free stacks only.
double series_resistance_oracle(const StackModel& stack, double flux);

/// Exact lumped equivalent of a stack: a node on every interface plus a centre
/// node carrying the source of each heated layer.
ThermalNetwork stack_to_network(const StackModel& stack);

/// PDMS / Al / SiO2 / TE / polyimide column over one leg, heated in the metal,
/// convective top and skin-clamped bottom.
StackModel default_stack(const DesignPoint& design, const Environment& env, double hotspot_power,
                         const Calibration& cal);

void write_profile_csv(std::ostream& os, const ThermalSolution& solution);

}  // namespace thermoharvest
