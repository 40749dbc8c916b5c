#include "thermoharvest/validation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "thermoharvest/moo.hpp"
#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/surrogate.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

OracleCheck make_check(std::string name, double error, double tolerance, std::string detail = {}) {
    return {std::move(name), error, tolerance, std::isfinite(error) && error <= tolerance, std::move(detail)};
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

void anchor_checks(const Calibration& cal, std::vector<OracleCheck>& out) {
    const auto m = evaluate_design(default_design(), Environment{}, default_incident(), cal);
    out.push_back(make_check("anchor dT_K", std::abs(m.delta_T_eff - 12.9), 0.5, format_double(m.delta_T_eff)));
    out.push_back(make_check("anchor T_hot_C", std::abs(m.hot_temp - 273.15 - 41.8), 0.5,
                             format_double(m.hot_temp - 273.15)));
    out.push_back(make_check("anchor T_cold_C", std::abs(m.cold_temp - 273.15 - 28.9), 0.5,
                             format_double(m.cold_temp - 273.15)));
    out.push_back(make_check("anchor max_enhancement", std::abs(m.max_enhancement - 9.8), 0.2,
                             format_double(m.max_enhancement)));
    out.push_back(make_check("anchor voc_V (relative)", rel(m.v_oc, 2.709e-3), 0.01, format_double(m.v_oc)));
    out.push_back(make_check("anchor pout_W (relative)", rel(m.p_out, 1.528e-7), 0.02, format_double(m.p_out)));
}

StackModel random_stack(const Calibration& cal, RandomStream& rng, bool sourced) {
    Environment env;
    env.convection_coeff = rng.uniform(5.0, 50.0);
    env.skin_temp = rng.uniform(303.0, 310.0);
    const double hotspot = sourced ? rng.uniform(2e-9, 5e-8) : 0.0;
    auto stack = default_stack(default_design(), env, hotspot, cal);
    for (auto& layer : stack.layers) {
        layer.thickness *= rng.uniform(0.5, 2.0);
    }
    if (!sourced) {
        stack.top_bc = BoundaryCondition::fixed(rng.uniform(310.0, 330.0));
    }
    return stack;
}

void stack_checks(const Calibration& cal, std::uint64_t seed, std::vector<OracleCheck>& out) {
    RandomStream rng(derive_seed(seed, "validate.stacks"));
    double worst_series = 0.0;
    double worst_network = 0.0;
    double worst_balance = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto stack = random_stack(cal, rng, false);
        const auto fd = stack_fd_profile(stack, 20);
        const double drop = stack.top_bc.temp - stack.bottom_bc.temp;
        const double flux = drop / series_resistance_oracle(stack, 1.0);
        const auto& te = stack.layers[stack.te_layer];
        const double expected = flux * te.thickness / te.props.conductivity;
        worst_series = std::max(worst_series, rel(fd.delta_T, expected));
        worst_balance = std::max(worst_balance, fd.energy_residual());
    }
    for (int i = 0; i < 5; ++i) {
        const auto stack = random_stack(cal, rng, true);
        const auto fd = stack_fd_profile(stack, 20);
        const auto net = solve_steady(stack_to_network(stack));
        worst_network = std::max(worst_network, rel(fd.delta_T, net.delta_T));
        worst_balance = std::max({worst_balance, fd.energy_residual(), net.energy_residual()});
    }
    const auto device = solve_steady(build_network(default_design(), Environment{}, 1e-8, cal));
    worst_balance = std::max(worst_balance, device.energy_residual());
    out.push_back(make_check("series-resistance oracle (relative)", worst_series, 1e-3));
    out.push_back(make_check("network vs finite-volume dT (relative)", worst_network, 1e-2));
    out.push_back(make_check("steady energy balance (relative)", worst_balance, 1e-9));
}

void gpr_check(std::uint64_t seed, std::vector<OracleCheck>& out) {
    const std::vector<std::pair<double, double>> box{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    const auto pts = latin_hypercube(box, 40, derive_seed(seed, "validate.gpr"));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.size()), 3);
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        x.row(i) << p[0], p[1], p[2];
        y(i) = std::sin(3.0 * p[0]) + std::cos(2.0 * p[1]) + p[2] * p[2];
    }
    TuneOptions opts;
    opts.seed = derive_seed(seed, "validate.gpr.tune");
    opts.noise_variance = 1e-8;
    const auto model = tune_hyperparameters(x, y, opts);
    Eigen::VectorXd mean;
    gpr_predict_batch(model, x, mean);
    const double sd = std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(y.size()));
    out.push_back(make_check("GP training interpolation (error / target std)", (mean - y).cwiseAbs().maxCoeff() / sd,
                             1e-3));
}

void pareto_check(const Calibration& cal, std::uint64_t seed, std::vector<OracleCheck>& out) {
    const auto bounds = default_bounds();
    const std::size_t vars[3] = {design_variable_index("tspacer_m"), design_variable_index("hte_m"),
                                 design_variable_index("flare_deg")};
    auto level = [](double x) { return std::min(7, static_cast<int>(x)); };
    auto snap = [&](const std::vector<double>& x) {
        auto v = default_design().to_vector();
        for (int i = 0; i < 3; ++i) {
            const auto [lo, hi] = bounds.ranges[vars[i]];
            v[vars[i]] = lo + (hi - lo) * level(x[static_cast<std::size_t>(i)]) / 7.0;
        }
        return DesignPoint::from_vector(v);
    };
    const auto objective = direct_objective(Environment{}, default_incident(), cal);

    std::vector<Individual> all;
    std::vector<ObjectiveVector> objs;
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            for (int c = 0; c < 8; ++c) {
                Individual ind;
                ind.x = {a + 0.5, b + 0.5, c + 0.5};
                ind.objectives = objective(snap(ind.x));
                objs.push_back(ind.objectives);
                all.push_back(std::move(ind));
            }
        }
    }
    const auto brute = build_front(all, normalized_frame(objs));

    NsgaConfig cfg;
    cfg.seed = derive_seed(seed, "validate.pareto");
    cfg.evaluator = EvaluatorKind::Direct;
    const auto evolved =
        evolve_box({{0.0, 8.0}, {0.0, 8.0}, {0.0, 8.0}}, cfg, [&](const std::vector<double>& x) { return objective(snap(x)); });

    std::set<std::vector<int>> want;
    std::set<std::vector<int>> got;
    for (const auto& m : brute.members) {
        want.insert({level(m.x[0]), level(m.x[1]), level(m.x[2])});
    }
    for (const auto& m : evolved.front.members) {
        got.insert({level(m.x[0]), level(m.x[1]), level(m.x[2])});
    }
    std::size_t mismatched = 0;
    for (const auto& w : want) {
        mismatched += got.count(w) ? 0 : 1;
    }
    for (const auto& g : got) {
        mismatched += want.count(g) ? 0 : 1;
    }
    out.push_back(make_check("NSGA-II front vs exhaustive 512-point front (mismatched members)",
                             static_cast<double>(mismatched), 0.0,
                             std::to_string(got.size()) + " evolved, " + std::to_string(want.size()) + " exhaustive"));
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(const Calibration& cal, std::uint64_t seed) {
    std::vector<OracleCheck> out;
    out.push_back(make_check("ledger derived constants (relative)", derived_mismatch(cal), 1e-9));
    anchor_checks(cal, out);
    stack_checks(cal, seed, out);
    gpr_check(seed, out);
    pareto_check(cal, seed, out);
    return out;
}

void write_validation_csv(std::ostream& os, const std::vector<OracleCheck>& checks, std::uint64_t seed,
                          const std::string& ledger) {
    os << provenance_comment(seed, ledger) << '\n';
    os << "check,error,tolerance,passed\n";
    for (const auto& c : checks) {
        os << '"' << c.name << "\"," << format_double(c.error) << ',' << format_double(c.tolerance) << ','
           << (c.passed ? "true" : "false") << '\n';
    }
}

}  // namespace thermoharvest
