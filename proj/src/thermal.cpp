#include "thermoharvest/thermal.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

struct Assembled {
    Eigen::MatrixXd G;
    Eigen::VectorXd b;
    Eigen::VectorXd C;
};

/// Unknowns are temperatures minus `t_ref`.
Assembled assemble(const ThermalNetwork& net, double t_ref = 0.0) {
    const auto n = static_cast<Eigen::Index>(net.nodes().size());
    Assembled s{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        s.C(i) = net.nodes()[static_cast<std::size_t>(i)].heat_capacity;
    }
    for (const auto& e : net.edges()) {
        const double g = 1.0 / e.resistance;
        const auto ia = net.node_index(e.a);
        const auto ib = net.node_index(e.b);
        if (ia && ib) {
            const auto a = static_cast<Eigen::Index>(*ia), b = static_cast<Eigen::Index>(*ib);
            s.G(a, a) += g;
            s.G(b, b) += g;
            s.G(a, b) -= g;
            s.G(b, a) -= g;
        } else if (ia || ib) {
            const auto node = static_cast<Eigen::Index>(ia ? *ia : *ib);
            const auto& res = net.reservoirs()[*net.reservoir_index(ia ? e.b : e.a)];
            s.G(node, node) += g;
            s.b(node) += g * (res.temp - t_ref);
        }
    }
    for (const auto& src : net.sources()) {
        s.b(static_cast<Eigen::Index>(*net.node_index(src.node))) += src.power;
    }
    return s;
}

double temp_of(const ThermalNetwork& net, const Eigen::VectorXd& t, const std::string& id, double t_ref) {
    if (auto i = net.node_index(id)) {
        return t(static_cast<Eigen::Index>(*i));
    }
    return net.reservoirs()[*net.reservoir_index(id)].temp - t_ref;
}

ThermalSolution make_solution(const ThermalNetwork& net, const Eigen::VectorXd& t, double t_ref = 0.0) {
    ThermalSolution sol;
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
        sol.node_temps[net.nodes()[i].id] = t(static_cast<Eigen::Index>(i)) + t_ref;
    }
    for (const auto& r : net.reservoirs()) {
        sol.node_temps[r.id] = r.temp;
    }
    for (const auto& src : net.sources()) {
        sol.source_power += src.power;
    }
    for (const auto& e : net.edges()) {
        const bool ra = net.reservoir_index(e.a).has_value();
        const bool rb = net.reservoir_index(e.b).has_value();
        const double flow_a_to_b = (temp_of(net, t, e.a, t_ref) - temp_of(net, t, e.b, t_ref)) / e.resistance;
        if (rb) {
            sol.boundary_outflow += flow_a_to_b;
        }
        if (ra) {
            sol.boundary_outflow -= flow_a_to_b;
        }
        if (ra != rb) {
            sol.boundary_throughput += std::abs(flow_a_to_b);
        }
    }
    const double hot = temp_of(net, t, net.hot_terminal(), t_ref);
    const double cold = temp_of(net, t, net.cold_terminal(), t_ref);
    sol.hot_temp = hot + t_ref;
    sol.cold_temp = cold + t_ref;
    sol.delta_T = hot - cold;
    return sol;
}

double rho_c(const ThermalLayerProps& p) { return p.density * p.specific_heat; }

}  // namespace

void Environment::validate() const {
    if (!(ambient_temp > 0.0) || !(skin_temp >= ambient_temp)) {
        throw DomainError("environment needs 0 < ambient_temp <= skin_temp");
    }
    if (!(convection_coeff > 0.0)) {
        throw DomainError("convection coefficient must be positive");
    }
    if (!(emissivity >= 0.0 && emissivity <= 1.0)) {
        throw DomainError("emissivity must lie in [0, 1]");
    }
}

double radiative_conductance(double emissivity, double mean_temp) {
    return 4.0 * emissivity * kStefanBoltzmann * mean_temp * mean_temp * mean_temp;
}

// --- ThermalNetwork ---------------------------------------------------------

void ThermalNetwork::check_new_id(const std::string& id) const {
    if (id.empty()) {
        throw ArgumentError("thermal network ids must be non-empty");
    }
    if (node_index(id) || reservoir_index(id)) {
        throw ArgumentError("duplicate thermal network id '" + id + "'");
    }
}

void ThermalNetwork::add_node(std::string id, double heat_capacity) {
    check_new_id(id);
    if (!(heat_capacity >= 0.0)) {
        throw ArgumentError("heat capacity of '" + id + "' must be non-negative");
    }
    nodes_.push_back({std::move(id), heat_capacity});
}

void ThermalNetwork::add_reservoir(std::string id, double temp) {
    check_new_id(id);
    if (!(temp > 0.0)) {
        throw ArgumentError("reservoir '" + id + "' needs a positive temperature");
    }
    reservoirs_.push_back({std::move(id), temp});
}

void ThermalNetwork::add_edge(std::string a, std::string b, double resistance) {
    for (const auto* id : {&a, &b}) {
        if (!node_index(*id) && !reservoir_index(*id)) {
            throw ArgumentError("edge endpoint '" + *id + "' is not a node or reservoir");
        }
    }
    if (a == b) {
        throw ArgumentError("edge endpoints must differ ('" + a + "')");
    }
    if (!(resistance > 0.0) || !std::isfinite(resistance)) {
        throw ArgumentError("edge " + a + "-" + b + " needs a positive finite resistance");
    }
    edges_.push_back({std::move(a), std::move(b), resistance});
}

void ThermalNetwork::add_source(std::string node, double power) {
    if (!node_index(node)) {
        throw ArgumentError("heat source must sit on an internal node, got '" + node + "'");
    }
    if (!std::isfinite(power)) {
        throw ArgumentError("heat source power must be finite");
    }
    sources_.push_back({std::move(node), power});
}

void ThermalNetwork::set_terminals(std::string hot, std::string cold) {
    for (const auto* id : {&hot, &cold}) {
        if (!node_index(*id) && !reservoir_index(*id)) {
            throw ArgumentError("terminal '" + *id + "' is not a node or reservoir");
        }
    }
    hot_ = std::move(hot);
    cold_ = std::move(cold);
}

std::string ThermalNetwork::hot_terminal() const {
    if (!hot_.empty()) {
        return hot_;
    }
    if (nodes_.empty()) {
        throw ArgumentError("thermal network has no nodes");
    }
    return nodes_.front().id;
}

std::string ThermalNetwork::cold_terminal() const {
    if (!cold_.empty()) {
        return cold_;
    }
    if (nodes_.empty()) {
        throw ArgumentError("thermal network has no nodes");
    }
    return nodes_.back().id;
}

double ThermalNetwork::resistance_between(const std::string& a, const std::string& b) const {
    double g = 0.0;
    for (const auto& e : edges_) {
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
            g += 1.0 / e.resistance;
        }
    }
    if (g == 0.0) {
        throw LookupError("no edge between '" + a + "' and '" + b + "'");
    }
    return 1.0 / g;
}

std::optional<std::size_t> ThermalNetwork::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> ThermalNetwork::reservoir_index(const std::string& id) const {
    for (std::size_t i = 0; i < reservoirs_.size(); ++i) {
        if (reservoirs_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

void ThermalNetwork::validate() const {
    if (reservoirs_.empty()) {
        throw SingularSystemError("thermal network needs at least one reservoir");
    }
    // Breadth-first from all reservoirs; every node must be reached.
    std::vector<bool> reached(nodes_.size(), false);
    std::deque<std::string> frontier;
    for (const auto& r : reservoirs_) {
        frontier.push_back(r.id);
    }
    while (!frontier.empty()) {
        const std::string cur = frontier.front();
        frontier.pop_front();
        for (const auto& e : edges_) {
            const std::string* other = nullptr;
            if (e.a == cur) {
                other = &e.b;
            } else if (e.b == cur) {
                other = &e.a;
            }
            if (!other) {
                continue;
            }
            if (auto i = node_index(*other); i && !reached[*i]) {
                reached[*i] = true;
                frontier.push_back(*other);
            }
        }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!reached[i]) {
            throw SingularSystemError("node '" + nodes_[i].id + "' is not connected to any reservoir");
        }
    }
}

std::string ThermalNetwork::to_json() const {
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes_) {
        doc["nodes"].push_back({{"id", n.id}, {"heat_capacity_J_K", n.heat_capacity}});
    }
    doc["reservoirs"] = nlohmann::json::array();
    for (const auto& r : reservoirs_) {
        doc["reservoirs"].push_back({{"id", r.id}, {"temp_K", r.temp}});
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : edges_) {
        doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"resistance_K_W", e.resistance}});
    }
    doc["sources"] = nlohmann::json::array();
    for (const auto& s : sources_) {
        doc["sources"].push_back({{"node", s.node}, {"power_W", s.power}});
    }
    if (!nodes_.empty() || !hot_.empty()) {
        doc["terminals"] = {{"hot", hot_terminal()}, {"cold", cold_terminal()}};
    }
    return doc.dump(2);
}

double ThermalSolution::energy_residual() const noexcept {
    const double scale = std::max({std::abs(source_power), std::abs(boundary_outflow), boundary_throughput, 1e-300});
    return std::abs(source_power - boundary_outflow) / scale;
}

// --- solvers ----------------------------------------------------------------

namespace {

/// Nodal heat imbalance (sources minus edge outflows) accumulated edge by edge
/// in extended precision. Unlike b - G t this keeps each row's conductance
/// sum exact, which is what the boundary energy balance measures.
Eigen::VectorXd edge_residual(const ThermalNetwork& net, const Eigen::VectorXd& t, double t_ref) {
    std::vector<long double> r(static_cast<std::size_t>(t.size()), 0.0L);
    auto value = [&](const std::string& id) -> long double {
        if (auto i = net.node_index(id)) {
            return t(static_cast<Eigen::Index>(*i));
        }
        return static_cast<long double>(net.reservoirs()[*net.reservoir_index(id)].temp) - t_ref;
    };
    for (const auto& src : net.sources()) {
        r[*net.node_index(src.node)] += src.power;
    }
    for (const auto& e : net.edges()) {
        const long double flow = (value(e.a) - value(e.b)) / e.resistance;
        if (auto i = net.node_index(e.a)) {
            r[*i] -= flow;
        }
        if (auto j = net.node_index(e.b)) {
            r[*j] += flow;
        }
    }
    Eigen::VectorXd out(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        out(i) = static_cast<double>(r[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace

ThermalSolution solve_steady(const ThermalNetwork& network) {
    network.validate();
    const double t_ref = network.reservoirs().front().temp;
    const auto sys = assemble(network, t_ref);
    Eigen::VectorXd t(sys.b.size());
    if (sys.b.size() > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(sys.G);
        if (llt.info() != Eigen::Success) {
            throw SingularSystemError("nodal conductance matrix is not positive definite");
        }
        t = llt.solve(sys.b);
        // Refinement with the residual accumulated in extended precision keeps
        // the energy residual at round-off level for stiff resistances.
        for (int pass = 0; pass < 3; ++pass) {
            t += llt.solve(edge_residual(network, t, t_ref));
        }
    }
    return make_solution(network, t, t_ref);
}

std::vector<TransientSample> solve_transient(const ThermalNetwork& network, double t_end, double dt,
                                             std::optional<std::vector<double>> initial) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) {
        throw ArgumentError("transient solve needs dt > 0 and t_end >= 0");
    }
    network.validate();
    for (const auto& n : network.nodes()) {
        if (!(n.heat_capacity > 0.0)) {
            throw ConfigError("node '" + n.id + "' has zero heat capacity; transient solve needs C > 0");
        }
    }
    const auto sys = assemble(network);
    const auto n = sys.b.size();
    Eigen::VectorXd t(n);
    if (initial) {
        if (initial->size() != static_cast<std::size_t>(n)) {
            throw ArgumentError("initial state has the wrong number of nodes");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            t(i) = (*initial)[static_cast<std::size_t>(i)];
        }
    } else {
        t.setConstant(network.reservoirs().front().temp);
    }

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
    const double h = t_end > 0.0 ? t_end / static_cast<double>(steps) : 0.0;
    std::vector<TransientSample> out;
    out.push_back({0.0, make_solution(network, t)});
    if (t_end == 0.0) {
        return out;
    }
    const Eigen::VectorXd c_over_h = sys.C / h;
    Eigen::MatrixXd lhs = sys.G;
    lhs.diagonal() += c_over_h;
    Eigen::LLT<Eigen::MatrixXd> llt(lhs);
    if (llt.info() != Eigen::Success) {
        throw SingularSystemError("implicit Euler system is not positive definite");
    }
    out.reserve(steps + 1);
    for (std::size_t k = 1; k <= steps; ++k) {
        t = llt.solve(c_over_h.cwiseProduct(t) + sys.b);
        out.push_back({h * static_cast<double>(k), make_solution(network, t)});
    }
    return out;
}

double slowest_time_constant(const ThermalNetwork& network) {
    network.validate();
    const auto sys = assemble(network);
    if (sys.b.size() == 0) {
        return 0.0;
    }
    if ((sys.C.array() <= 0.0).any()) {
        throw ConfigError("time constants need positive heat capacity on every node");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.G, sys.C.asDiagonal().toDenseMatrix());
    if (es.info() != Eigen::Success) {
        throw SingularSystemError("eigen decomposition of the network failed");
    }
    return 1.0 / es.eigenvalues().minCoeff();
}

// --- device network ---------------------------------------------------------

DeviceResistances device_resistances(const DesignPoint& design, const Environment& env, const Calibration& cal) {
    const auto pdms = layer_thermal_properties("pdms");
    const auto sio2 = layer_thermal_properties("sio2");
    const auto pi = layer_thermal_properties("polyimide");
    const auto te = te_properties(cal.teg.material);

    DeviceResistances r;
    r.cell_area = cal.optics.pitch * cal.optics.pitch;
    r.leg_area = design.te_width * design.te_width;
    const double h_rad =
        radiative_conductance(env.emissivity, 0.5 * (cal.thermal.target_hot_temp + env.ambient_temp));
    r.top_loss = cal.thermal.pdms_thickness / (pdms.conductivity * r.cell_area) +
                 1.0 / ((env.convection_coeff + h_rad) * r.cell_area);
    r.hot_to_cold = design.spacer_thickness / (sio2.conductivity * r.leg_area) +
                    design.te_height / (te.thermal_conductivity * r.leg_area);
    r.skin_path = cal.thermal.substrate_thickness / (pi.conductivity * r.cell_area);
    r.textile = cal.thermal.textile_resistance;
    return r;
}

ThermalNetwork build_network(const DesignPoint& design, const Environment& env, double hotspot_power,
                             const Calibration& cal) {
    if (!(hotspot_power >= 0.0)) {
        throw DomainError("hotspot power must be non-negative");
    }
    if (!cal.solved || !(cal.thermal.kappa > 0.0) || !(cal.thermal.textile_resistance > 0.0)) {
        throw ConfigError("calibration has not been solved (kappa / textile resistance missing)");
    }
    env.validate();
    const auto r = device_resistances(design, env, cal);

    const double te_c = rho_c(layer_thermal_properties("te_film")) * design.te_height * r.leg_area;
    const double hot_c = (rho_c(layer_thermal_properties("pdms")) * cal.thermal.pdms_thickness +
                          rho_c(layer_thermal_properties("aluminum")) * design.metal_thickness +
                          rho_c(layer_thermal_properties("sio2")) * design.spacer_thickness) *
                             r.cell_area +
                         0.5 * te_c;
    const double cold_c =
        0.5 * te_c + rho_c(layer_thermal_properties("polyimide")) * cal.thermal.substrate_thickness * r.cell_area;

    ThermalNetwork net;
    net.add_node("hot", hot_c);
    net.add_node("cold", cold_c);
    net.add_reservoir("ambient", env.ambient_temp);
    net.add_reservoir("textile", cal.thermal.textile_temp);
    net.add_reservoir("skin", env.skin_temp);
    net.add_edge("hot", "ambient", r.top_loss);
    net.add_edge("hot", "cold", r.hot_to_cold);
    net.add_edge("cold", "textile", r.textile);
    net.add_edge("cold", "skin", r.skin_path);
    net.add_source("hot", cal.thermal.kappa * hotspot_power);
    net.set_terminals("hot", "cold");
    return net;
}

// --- 1-D stack --------------------------------------------------------------

void StackModel::validate() const {
    if (layers.empty()) {
        throw ArgumentError("stack needs at least one layer");
    }
    if (!(area > 0.0)) {
        throw ArgumentError("stack area must be positive");
    }
    for (const auto& l : layers) {
        if (!(l.thickness > 0.0)) {
            throw ArgumentError("layer '" + l.layer_id + "' needs positive thickness");
        }
        if (!(l.props.conductivity > 0.0)) {
            throw ConfigError("layer '" + l.layer_id + "' has zero conductivity");
        }
    }
    for (const auto* bc : {&top_bc, &bottom_bc}) {
        if (!(bc->temp > 0.0)) {
            throw ArgumentError("boundary temperature must be positive");
        }
        if (bc->kind == BoundaryCondition::Kind::Convective && !(bc->h > 0.0)) {
            throw ArgumentError("convective boundary needs h > 0");
        }
    }
    if (te_layer >= layers.size()) {
        throw ArgumentError("te_layer index out of range");
    }
}

ThermalSolution stack_fd_profile(const StackModel& stack, std::size_t n_cells) {
    stack.validate();
    if (n_cells < 2) {
        throw ArgumentError("stack solve needs at least 2 cells per layer");
    }
    const std::size_t L = stack.layers.size();
    const std::size_t N = L * n_cells;
    std::vector<double> half_r(N), dx(N), q(N), zc(N);
    double z = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = stack.layers[l];
        const double h = layer.thickness / static_cast<double>(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) {
            const std::size_t i = l * n_cells + c;
            dx[i] = h;
            half_r[i] = 0.5 * h / layer.props.conductivity;
            q[i] = layer.source_density * h;
            zc[i] = z + (static_cast<double>(c) + 0.5) * h;
        }
        z += layer.thickness;
    }
    const double total = z;

    auto boundary_r = [](const BoundaryCondition& bc) {
        return bc.kind == BoundaryCondition::Kind::Convective ? 1.0 / bc.h : 0.0;
    };
    const double g_top = 1.0 / (half_r.front() + boundary_r(stack.top_bc));
    const double g_bot = 1.0 / (half_r.back() + boundary_r(stack.bottom_bc));
    std::vector<double> g_face(N > 0 ? N - 1 : 0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        g_face[i] = 1.0 / (half_r[i] + half_r[i + 1]);
    }

    // Tridiagonal (Thomas) solve, per unit area, for the rise above the bottom
    // boundary temperature in extended precision.
    using ld = long double;
    const double t_ref = stack.bottom_bc.temp;
    std::vector<ld> lower(N, 0.0L), diag(N, 0.0L), upper(N, 0.0L), rhs(q.begin(), q.end());
    for (std::size_t i = 0; i < N; ++i) {
        if (i > 0) {
            diag[i] += g_face[i - 1];
            lower[i] = -static_cast<ld>(g_face[i - 1]);
        }
        if (i + 1 < N) {
            diag[i] += g_face[i];
            upper[i] = -static_cast<ld>(g_face[i]);
        }
    }
    diag.front() += g_top;
    rhs.front() += static_cast<ld>(g_top) * (static_cast<ld>(stack.top_bc.temp) - t_ref);
    diag.back() += g_bot;
    for (std::size_t i = 1; i < N; ++i) {
        const ld m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<ld> theta(N);
    theta[N - 1] = rhs[N - 1] / diag[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        theta[i] = (rhs[i] - upper[i] * theta[i + 1]) / diag[i];
    }
    std::vector<double> T(N);
    for (std::size_t i = 0; i < N; ++i) {
        T[i] = static_cast<double>(t_ref + theta[i]);
    }

    // Face temperatures from flux continuity across each face.
    const ld theta_top = static_cast<ld>(stack.top_bc.temp) - t_ref;
    const ld flux_top_out_ld = (theta.front() - theta_top) * g_top;  // leaving upward
    const ld flux_bot_out_ld = theta.back() * g_bot;
    const double flux_top_out = static_cast<double>(flux_top_out_ld);
    const double flux_bot_out = static_cast<double>(flux_bot_out_ld);
    std::vector<double> face_T(N + 1);
    face_T[0] = static_cast<double>(t_ref + theta.front() - flux_top_out_ld * half_r.front());
    face_T[N] = static_cast<double>(t_ref + theta.back() - flux_bot_out_ld * half_r.back());
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const ld flux_down = (theta[i] - theta[i + 1]) * g_face[i];
        face_T[i + 1] = static_cast<double>(t_ref + theta[i] - flux_down * half_r[i]);
    }

    ThermalSolution sol;
    sol.profile_z.push_back(0.0);
    sol.profile_temp.push_back(face_T[0]);
    for (std::size_t i = 0; i < N; ++i) {
        sol.profile_z.push_back(zc[i]);
        sol.profile_temp.push_back(T[i]);
    }
    sol.profile_z.push_back(total);
    sol.profile_temp.push_back(face_T[N]);

    sol.hot_temp = face_T[stack.te_layer * n_cells];
    sol.cold_temp = face_T[(stack.te_layer + 1) * n_cells];
    sol.delta_T = sol.hot_temp - sol.cold_temp;
    for (const auto& l : stack.layers) {
        sol.source_power += l.source_density * l.thickness * stack.area;
    }
    sol.boundary_outflow = (flux_top_out + flux_bot_out) * stack.area;
    sol.boundary_throughput = (std::abs(flux_top_out) + std::abs(flux_bot_out)) * stack.area;
    sol.node_temps["top"] = face_T[0];
    sol.node_temps["bottom"] = face_T[N];
    sol.node_temps["te_top"] = sol.hot_temp;
    sol.node_temps["te_bottom"] = sol.cold_temp;
    return sol;
}

double series_resistance_oracle(const StackModel& stack, double flux) {
    stack.validate();
    double r = 0.0;
    for (const auto& l : stack.layers) {
        if (l.source_density != 0.0) {
            throw ArgumentError("series-resistance oracle applies to source-free stacks only");
        }
        r += l.thickness / l.props.conductivity;
    }
    for (const auto* bc : {&stack.top_bc, &stack.bottom_bc}) {
        if (bc->kind == BoundaryCondition::Kind::Convective) {
            r += 1.0 / bc->h;
        }
    }
    return flux * r;
}

ThermalNetwork stack_to_network(const StackModel& stack) {
    stack.validate();
    const std::size_t L = stack.layers.size();
    const double A = stack.area;
    ThermalNetwork net;
    auto face = [](std::size_t i) { return "f" + std::to_string(i); };
    auto centre = [](std::size_t l) { return "c" + std::to_string(l); };

    // Heat capacity lumped onto faces (and centres of heated layers).
    std::vector<double> face_c(L + 1, 0.0);
    std::vector<double> centre_c(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = stack.layers[l];
        const double c = rho_c(layer.props) * layer.thickness * A;
        if (layer.source_density != 0.0) {
            centre_c[l] = 0.5 * c;
            face_c[l] += 0.25 * c;
            face_c[l + 1] += 0.25 * c;
        } else {
            face_c[l] += 0.5 * c;
            face_c[l + 1] += 0.5 * c;
        }
    }

    const auto fixed = BoundaryCondition::Kind::Fixed;
    for (std::size_t i = 0; i <= L; ++i) {
        if (i == 0 && stack.top_bc.kind == fixed) {
            net.add_reservoir(face(i), stack.top_bc.temp);
        } else if (i == L && stack.bottom_bc.kind == fixed) {
            net.add_reservoir(face(i), stack.bottom_bc.temp);
        } else {
            net.add_node(face(i), face_c[i]);
        }
    }
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = stack.layers[l];
        const double r = layer.thickness / (layer.props.conductivity * A);
        if (layer.source_density != 0.0) {
            net.add_node(centre(l), centre_c[l]);
            net.add_edge(face(l), centre(l), 0.5 * r);
            net.add_edge(centre(l), face(l + 1), 0.5 * r);
            net.add_source(centre(l), layer.source_density * layer.thickness * A);
        } else {
            net.add_edge(face(l), face(l + 1), r);
        }
    }
    if (stack.top_bc.kind != fixed) {
        net.add_reservoir("top_env", stack.top_bc.temp);
        net.add_edge(face(0), "top_env", 1.0 / (stack.top_bc.h * A));
    }
    if (stack.bottom_bc.kind != fixed) {
        net.add_reservoir("bottom_env", stack.bottom_bc.temp);
        net.add_edge(face(L), "bottom_env", 1.0 / (stack.bottom_bc.h * A));
    }
    net.set_terminals(face(stack.te_layer), face(stack.te_layer + 1));
    return net;
}

StackModel default_stack(const DesignPoint& design, const Environment& env, double hotspot_power,
                         const Calibration& cal) {
    env.validate();
    StackModel s;
    s.area = design.te_width * design.te_width;
    const double heated = cal.thermal.kappa * hotspot_power / (s.area * design.metal_thickness);
    s.layers = {
        {"pdms", cal.thermal.pdms_thickness, layer_thermal_properties("pdms"), 0.0},
        {"aluminum", design.metal_thickness, layer_thermal_properties("aluminum"), heated},
        {"sio2", design.spacer_thickness, layer_thermal_properties("sio2"), 0.0},
        {"te_film", design.te_height, layer_thermal_properties("te_film"), 0.0},
        {"polyimide", cal.thermal.substrate_thickness, layer_thermal_properties("polyimide"), 0.0},
    };
    const double h_rad =
        radiative_conductance(env.emissivity, 0.5 * (cal.thermal.target_hot_temp + env.ambient_temp));
    s.top_bc = BoundaryCondition::convective(env.ambient_temp, env.convection_coeff + h_rad);
    s.bottom_bc = BoundaryCondition::fixed(env.skin_temp);
    s.te_layer = 3;
    return s;
}

void write_profile_csv(std::ostream& os, const ThermalSolution& solution) {
    os << "z_m,temp_K\n";
    for (std::size_t i = 0; i < solution.profile_z.size(); ++i) {
        os << format_double(solution.profile_z[i]) << ',' << format_double(solution.profile_temp[i]) << '\n';
    }
}

}  // namespace thermoharvest
