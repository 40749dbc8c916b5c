// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "thermoharvest/cli.hpp"
#include "thermoharvest/moo.hpp"
#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/surrogate.hpp"
#include "thermoharvest/teg.hpp"
#include "thermoharvest/thermal.hpp"
#include "thermoharvest/util.hpp"

using namespace thermoharvest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
    Criterion(int i, std::string n) : id(i), name(std::move(n)) {}

    int id;
    std::string name;
    bool passed = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) passed = false;
        notes.push_back((ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"thermoharvest"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return code;
}

bool same_file(const std::filesystem::path& a, const std::filesystem::path& b) {
    return std::filesystem::exists(a) && std::filesystem::exists(b) && read_text_file(a) == read_text_file(b);
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
    return cov * cov / (vx * vy);
}

template <class F>
bool strictly(const std::vector<double>& v, F cmp) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!cmp(v[i], v[i - 1])) return false;
    return true;
}

StackModel random_stack(RandomStream& rng, bool heated) {
    StackModel s;
    s.area = 1e-10 * (0.5 + rng.uniform());
    const std::size_t layers = 2 + rng.below(4);
    for (std::size_t l = 0; l < layers; ++l) {
        StackLayer layer{"l" + std::to_string(l), 1e-7 * (1.0 + 100.0 * rng.uniform()),
                         {1000.0, 1000.0, 0.1 + 200.0 * rng.uniform()}, 0.0};
        if (heated && l == 1) layer.source_density = 1e12 * (0.1 + rng.uniform());
        s.layers.push_back(layer);
    }
    s.top_bc = BoundaryCondition::convective(298.15, 5.0 + 50.0 * rng.uniform());
    s.bottom_bc = BoundaryCondition::fixed(306.15);
    s.te_layer = layers - 1;
    return s;
}

// 1 -------------------------------------------------------------------------
Criterion anchors() {
    Criterion c{1, "anchor reproduction"};
    const auto t0 = Clock::now();
    const auto& cal = default_calibration();
    const auto m = evaluate_design(default_design(), Environment{}, default_incident(), cal);
    const double secs = seconds_since(t0);
    const double density_mw_cm2 = power_density(m.p_out, cal.teg.junction_density) * 0.1;
    c.expect(std::abs(m.delta_T_eff - 12.9) <= 0.5, fmt("dT_eff = %.4f K (12.9 +- 0.5)", m.delta_T_eff));
    c.expect(std::abs(m.hot_temp - 273.15 - 41.8) <= 0.5, fmt("T_hot = %.4f C (41.8 +- 0.5)", m.hot_temp - 273.15));
    c.expect(std::abs(m.cold_temp - 273.15 - 28.9) <= 0.5,
             fmt("T_cold = %.4f C (28.9 +- 0.5)", m.cold_temp - 273.15));
    c.expect(std::abs(m.max_enhancement - 9.8) <= 0.2, fmt("max |E/E0|^2 = %.4f (9.8 +- 0.2)", m.max_enhancement));
    c.expect(th_test::rel_diff(m.v_oc, 2.709e-3) <= 0.01, fmt("V_oc = %.6g V (2.709e-3 +- 1%%)", m.v_oc));
    c.expect(th_test::rel_diff(m.p_out, 1.528e-7) <= 0.02, fmt("P_out = %.6g W (1.528e-7 +- 2%%)", m.p_out));
    c.expect(th_test::rel_diff(density_mw_cm2, 0.153) <= 0.02,
             fmt("power density = %.5f mW/cm^2 (0.153 +- 2%%)", density_mw_cm2));
    c.expect(secs < 1.0, fmt("runtime %.3f s (< 1 s, includes ledger solve)", secs));
    return c;
}

// 2 -------------------------------------------------------------------------
Criterion thermoelectric() {
    Criterion c{2, "thermoelectric exactness"};
    RandomStream rng(derive_seed(2, "acceptance.teg"));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double v = std::pow(10.0, -6.0 + 6.0 * rng.uniform());
        const double r = std::pow(10.0, -1.0 + 4.0 * rng.uniform());
        const double exact = v * v / (4.0 * r);
        worst = std::max(worst, std::abs(load_power(v, r, r) - exact) / exact);
    }
    c.expect(worst <= 4 * 2.220446049250313e-16, fmt("matched-load identity worst rel error %.3g (<= 4 ulp)", worst));

    double worst_arg = 0.0;
    for (double r_int : {0.5, 12.0, 830.0}) {
        const double v = 2.709e-3;
        auto f = [&](double log_r) { return load_power(v, r_int, std::exp(log_r)); };
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = std::log(r_int / 100.0), b = std::log(r_int * 100.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = f(x1), f2 = f(x2);
        while (b - a > 1e-9) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = f(x1);
            }
        }
        const double arg = std::exp(0.5 * (a + b));
        worst_arg = std::max(worst_arg, std::abs(arg - r_int) / r_int);
    }
    c.expect(worst_arg <= 1e-3, fmt("golden-section argmax vs r_int worst rel error %.3g (<= 0.1%%)", worst_arg));
    return c;
}

// 3 -------------------------------------------------------------------------
Criterion thermal_oracles() {
    Criterion c{3, "thermal oracle equivalence"};
    RandomStream rng(derive_seed(3, "acceptance.stacks"));
    double worst_net = 0.0, worst_series = 0.0, worst_energy = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto s = random_stack(rng, true);
        const auto fd = stack_fd_profile(s, 40);
        const auto net = solve_steady(stack_to_network(s));
        worst_net = std::max(worst_net, std::abs(net.delta_T - fd.delta_T) / std::abs(fd.delta_T));
        worst_energy = std::max({worst_energy, fd.energy_residual(), net.energy_residual()});
    }
    for (int i = 0; i < 20; ++i) {
        const auto s = random_stack(rng, false);
        const double top = 320.0;
        auto fixed_top = s;
        fixed_top.top_bc = BoundaryCondition::fixed(top);
        const auto fd = stack_fd_profile(fixed_top, 40);
        const double flux = 0.5 * fd.boundary_throughput / fixed_top.area;
        const double drop = series_resistance_oracle(fixed_top, flux);
        worst_series = std::max(worst_series, std::abs(drop - (top - 306.15)) / (top - 306.15));
        worst_energy = std::max({worst_energy, fd.energy_residual(), solve_steady(stack_to_network(fixed_top)).energy_residual()});
    }
    const auto& cal = default_calibration();
    for (const auto& d : sample_designs(default_bounds(), 20, derive_seed(3, "acceptance.designs"))) {
        const auto net = build_network(d, Environment{}, 1e-6, cal);
        worst_energy = std::max(worst_energy, solve_steady(net).energy_residual());
        const auto st = stack_fd_profile(default_stack(d, Environment{}, 1e-6, cal), 16);
        worst_energy = std::max(worst_energy, st.energy_residual());
    }
    c.expect(worst_net <= 0.01, fmt("network vs finite-volume dT, 20 sourced stacks: worst %.3g (<= 1%%)", worst_net));
    c.expect(worst_series <= 1e-3,
             fmt("series-resistance oracle, 20 source-free stacks: worst %.3g (<= 0.1%%)", worst_series));
    c.expect(worst_energy < 1e-9, fmt("energy-balance residual, every solve: worst %.3g (< 1e-9)", worst_energy));
    return c;
}

// 4 -------------------------------------------------------------------------
Criterion transients() {
    Criterion c{4, "transient consistency"};
    const double R = 2e4, C = 5e-5, P = 1e-3, T0 = 306.15, tau = R * C;
    ThermalNetwork rc;
    rc.add_node("n", C);
    rc.add_reservoir("r", T0);
    rc.add_edge("n", "r", R);
    rc.add_source("n", P);
    const auto tr = solve_transient(rc, tau, tau / 1000.0);
    const double rise = tr.back().state.node_temps.at("n") - T0;
    const double exact = P * R * (1.0 - std::exp(-1.0));
    const double err = std::abs(rise - exact) / exact;
    c.expect(err <= 0.01, fmt("RC step at t = RC: rel error %.3g (<= 1%%)", err));

    std::vector<ThermalNetwork> nets{rc};
    const auto& cal = default_calibration();
    for (const auto& d : sample_designs(default_bounds(), 5, derive_seed(4, "acceptance.transient"))) {
        const auto meta = metasurface_from_design(d, cal.optics);
        const double p_abs = absorbed_power(meta, cal.optics, default_incident(), default_wavelength_grid());
        nets.push_back(build_network(d, Environment{}, hotspot_power(p_abs, d.spacer_thickness, cal.coupling), cal));
    }
    RandomStream rng(derive_seed(4, "acceptance.chain"));
    ThermalNetwork chain;
    chain.add_reservoir("a", 298.15);
    chain.add_reservoir("b", 306.15);
    for (int i = 0; i < 6; ++i) {
        chain.add_node("n" + std::to_string(i), 1e-3 * (0.5 + rng.uniform()));
        chain.add_edge("n" + std::to_string(i), i ? "n" + std::to_string(i - 1) : "a", 100.0 * (0.5 + rng.uniform()));
    }
    chain.add_edge("n5", "b", 100.0);
    chain.add_source("n2", 0.05);
    nets.push_back(chain);

    double worst = 0.0;
    for (const auto& net : nets) {
        const double t5 = 5.0 * slowest_time_constant(net);
        const auto run = solve_transient(net, t5, t5 / 5000.0);
        const auto ss = solve_steady(net);
        for (const auto& [id, t] : run.back().state.node_temps) {
            worst = std::max(worst, std::abs(t - ss.node_temps.at(id)) / ss.node_temps.at(id));
        }
    }
    c.expect(worst <= 1e-3, fmt("distance from steady state at 5 tau, %.0f networks: worst %.3g (<= 0.1%%)",
                                static_cast<double>(nets.size()), worst));
    return c;
}

// 5 -------------------------------------------------------------------------
Eigen::MatrixXd lhs_matrix(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::vector<std::pair<double, double>> box(dim, {0.0, 1.0});
    const auto pts = latin_hypercube(box, n, seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = pts[i][d];
    return x;
}

Eigen::VectorXd smooth3(const Eigen::MatrixXd& x) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        y(i) = std::sin(M_PI * x(i, 0)) * std::cos(M_PI * x(i, 1)) + x(i, 2) * x(i, 2) + 0.5 * x(i, 0) * x(i, 2);
    }
    return y;
}

Criterion gpr() {
    Criterion c{5, "GPR properties"};
    TuneOptions tune;
    tune.seed = derive_seed(5, "acceptance.gpr");
    tune.noise_variance = 1e-8;

    const auto x40 = lhs_matrix(40, 3, derive_seed(5, "interp"));
    const auto y40 = smooth3(x40);
    const auto m40 = tune_hyperparameters(x40, y40, tune);
    Eigen::VectorXd mean;
    gpr_predict_batch(m40, x40, mean);
    const double sd = std::sqrt((y40.array() - y40.mean()).square().mean());
    const double interp = (mean - y40).cwiseAbs().maxCoeff() / sd;
    c.expect(interp <= 1e-3, fmt("training-point interpolation error %.3g target std (<= 1e-3)", interp));

    const auto x200 = lhs_matrix(200, 3, derive_seed(5, "train"));
    const auto m200 = tune_hyperparameters(x200, smooth3(x200), tune);
    const auto xt = lhs_matrix(1000, 3, derive_seed(5, "held-out"));
    const auto yt = smooth3(xt);
    gpr_predict_batch(m200, xt, mean);
    const auto held = regression_metrics(std::vector<double>(yt.data(), yt.data() + yt.size()),
                                         std::vector<double>(mean.data(), mean.data() + mean.size()));
    c.expect(held.r_squared >= 0.95, fmt("smooth 3-D function, 200 LHS samples: held-out R^2 %.5f (>= 0.95)",
                                         held.r_squared));

    const auto& cal = default_calibration();
    const auto ds = generate_dataset(default_bounds(), 200, derive_seed(5, "dataset"), Environment{},
                                     default_incident(), cal);
    CvOptions cv;
    cv.folds = 5;
    cv.seed = derive_seed(5, "cv");
    cv.tune = tune;
    const auto t0 = Clock::now();
    const auto bundle = train_surrogate(ds, {"dT_K", "pout_W"}, cv);
    const double secs = seconds_since(t0);
    c.expect(bundle.cv.at("dT_K").r_squared >= 0.92,
             fmt("physics dataset 5-fold CV R^2 dT %.4f (>= 0.92)", bundle.cv.at("dT_K").r_squared));
    c.expect(bundle.cv.at("pout_W").r_squared >= 0.92,
             fmt("physics dataset 5-fold CV R^2 P_out %.4f (>= 0.92)", bundle.cv.at("pout_W").r_squared));
    c.expect(secs < 10.0, fmt("train + CV runtime %.2f s (< 10 s)", secs));
    return c;
}

// 6 -------------------------------------------------------------------------
Criterion nsga(double surrogate_optimize_secs) {
    Criterion c{6, "NSGA-II correctness"};
    const auto& cal = default_calibration();
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
    std::vector<ObjectiveVector> grid;
    std::vector<std::vector<int>> cells;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int d = 0; d < 8; ++d) {
                grid.push_back(objective(snap({a + 0.5, b + 0.5, d + 0.5})));
                cells.push_back({a, b, d});
            }
    std::set<std::vector<int>> want;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < grid.size() && !dominated; ++j) dominated = dominates(grid[j], grid[i]);
        if (!dominated) want.insert(cells[i]);
    }
    NsgaConfig cfg;
    cfg.seed = derive_seed(6, "acceptance.discrete");
    cfg.evaluator = EvaluatorKind::Direct;
    const auto evolved = evolve_box({{0, 8}, {0, 8}, {0, 8}}, cfg,
                                    [&](const std::vector<double>& x) { return objective(snap(x)); });
    std::set<std::vector<int>> got;
    for (const auto& m : evolved.front.members) {
        // Re-evaluate the snapped design and keep the cell only if it is still non-dominated.
        const auto f = objective(snap(m.x));
        bool dominated = false;
        for (const auto& g : grid) dominated = dominated || dominates(g, f);
        if (!dominated) got.insert({level(m.x[0]), level(m.x[1]), level(m.x[2])});
    }
    c.expect(got == want, fmt("512-point discrete front: %.0f evolved vs %.0f brute-force cells, exact match",
                              static_cast<double>(got.size()), static_cast<double>(want.size())));

    NsgaConfig zcfg;
    zcfg.population = 100;
    zcfg.generations = 200;
    zcfg.seed = derive_seed(6, "acceptance.zdt1");
    zcfg.mutation_prob = 1.0 / 30.0;
    zcfg.reference = ObjectiveVector{1.1, 1.1};
    const std::vector<std::pair<double, double>> box(30, {0.0, 1.0});
    const auto z = evolve_box(box, zcfg, [](const std::vector<double>& x) {
        double g = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) g += x[i];
        g = 1.0 + 9.0 * g / 29.0;
        return ObjectiveVector{x[0], g * (1.0 - std::sqrt(x[0] / g))};
    });
    std::vector<ObjectiveVector> pts;
    for (const auto& m : z.front.members) pts.push_back(m.objectives);
    const double truth = 0.11 + 0.1 + 2.0 / 3.0;
    const double ratio = hypervolume(pts, {1.1, 1.1}) / truth;
    c.expect(ratio >= 0.98, fmt("convex two-objective problem (ZDT1, 30 vars), 100 x 200: HV ratio %.4f (>= 0.98)",
                                ratio));

    bool monotone = true;
    for (const auto* log : {&z.log, &evolved.log}) {
        for (std::size_t g = 1; g < log->size(); ++g) {
            for (std::size_t k = 0; k < (*log)[g].best.size(); ++k)
                monotone = monotone && (*log)[g].best[k] <= (*log)[g - 1].best[k];
            monotone = monotone && (*log)[g].archive_hypervolume >= (*log)[g - 1].archive_hypervolume;
        }
    }
    c.expect(monotone, "per-generation best objectives never worsen (and archive hypervolume never drops)");
    c.expect(surrogate_optimize_secs < 30.0,
             fmt("surrogate-mode optimize 100 x 200 runtime %.2f s (< 30 s)", surrogate_optimize_secs));
    return c;
}

// 7 -------------------------------------------------------------------------
Criterion trends() {
    Criterion c{7, "trend suite"};
    const auto& cal = default_calibration();
    const Environment env;
    const auto inc = default_incident();

    std::vector<double> gaps, log_eta, eta;
    for (double g = 2e-9; g <= 20e-9 + 1e-15; g += 0.5e-9) {
        auto d = default_design();
        d.gap = g;
        const double e = evaluate_design(d, env, inc, cal).max_enhancement;
        gaps.push_back(g);
        eta.push_back(e);
        log_eta.push_back(std::log(e));
    }
    const double r2 = linear_fit_r2(gaps, log_eta);
    c.expect(strictly(eta, std::less<>()), "enhancement strictly decreasing in gap on [2, 20] nm");
    c.expect(r2 >= 0.999, fmt("log-linear gap profile: R^2 %.6f (>= 0.999)", r2));

    std::vector<double> peak, fwhm;
    for (double th = 25.0; th <= 40.0 + 1e-12; th += 0.5) {
        auto d = default_design();
        d.flare_angle = th;
        const auto meta = metasurface_from_design(d, cal.optics);
        peak.push_back(peak_field_enhancement(meta, cal.optics).max_enhancement);
        fwhm.push_back(group_fwhm(meta.groups[1], meta.n_eff, cal.optics));
    }
    c.expect(strictly(peak, std::less<>()), "peak enhancement strictly decreasing in flare angle on [25, 40] deg");
    c.expect(strictly(fwhm, std::greater<>()), "FWHM strictly increasing in flare angle on [25, 40] deg");

    std::vector<double> lr;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [lo, hi] = default_bounds().ranges[k];
        for (int i = 0; i <= 20; ++i) lr.push_back(resonance_wavelength(lo + (hi - lo) * i / 20.0, cal.optics.n_eff));
    }
    c.expect(strictly(lr, std::greater<>()), "resonance wavelength strictly increasing in arm length");

    std::vector<double> ts, dts;
    for (double t = 10e-9; t <= 100e-9 + 1e-15; t += 1e-9) {
        auto d = default_design();
        d.spacer_thickness = t;
        ts.push_back(t);
        dts.push_back(evaluate_design(d, env, inc, cal).delta_T_eff);
    }
    const auto best = static_cast<std::size_t>(std::max_element(dts.begin(), dts.end()) - dts.begin());
    const bool interior = best > 0 && best + 1 < ts.size();
    c.expect(interior && ts[best] >= 30e-9 - 1e-15 && ts[best] <= 60e-9 + 1e-15,
             fmt("dT(t_spacer) interior maximum at %.0f nm of [10, 100] nm (expected in [30, 60])", ts[best] * 1e9));

    std::vector<double> dth, rint;
    for (double h = 5e-6; h <= 10e-6 + 1e-12; h += 0.25e-6) {
        auto d = default_design();
        d.te_height = h;
        const auto m = evaluate_design(d, env, inc, cal);
        dth.push_back(m.delta_T_eff);
        rint.push_back(m.internal_resistance);
    }
    c.expect(strictly(dth, std::greater<>()), "dT strictly increasing in h_TE on [5, 10] um");
    c.expect(strictly(rint, std::greater<>()), "R_int strictly increasing in h_TE on [5, 10] um");
    return c;
}

// 8 and 9 --------------------------------------------------------------------
struct PipelineTimes {
    double dataset = 0, train = 0, optimize = 0, report = 0, total = 0;
    bool ok = false;
};

PipelineTimes run_pipeline(const std::filesystem::path& dir, const std::string& workers) {
    PipelineTimes t;
    const std::vector<std::string> base{"--seed", "2024", "--workers", workers, "--out", dir.string()};
    auto step = [&](std::vector<std::string> extra, double& slot) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        const auto t0 = Clock::now();
        const int code = cli(args);
        slot = seconds_since(t0);
        return code == 0;
    };
    const auto t0 = Clock::now();
    t.ok = step({"dataset", "--samples", "500"}, t.dataset) && step({"train"}, t.train) &&
           step({"optimize", "--evaluator", "surrogate", "--population", "100", "--generations", "200"},
                t.optimize) &&
           step({"report"}, t.report);
    t.total = seconds_since(t0);
    return t;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(anchors());
    results.push_back(thermoelectric());
    results.push_back(thermal_oracles());
    results.push_back(transients());
    results.push_back(gpr());

    th_test::TempDir run1("accept_w1");
    th_test::TempDir run2("accept_w8");
    th_test::TempDir run3("accept_repeat");
    const auto p1 = run_pipeline(run1.path(), "1");

    results.push_back(nsga(p1.optimize));
    results.push_back(trends());

    Criterion det{8, "determinism"};
    const auto p2 = run_pipeline(run2.path(), "8");
    const auto p3 = run_pipeline(run3.path(), "1");
    det.expect(p1.ok && p2.ok && p3.ok, "three pipeline runs completed");
    for (const auto* f : {"dataset.csv", "dataset.json", "surrogate.json", "cv_metrics.csv", "front.csv",
                          "generations.csv", "front.svg", "knee.json", "manifest.json"}) {
        det.expect(same_file(run1.path() / f, run2.path() / f) && same_file(run1.path() / f, run3.path() / f),
                   std::string(f) + " identical across runs and across workers 1 vs 8");
    }
    results.push_back(det);

    Criterion e2e{9, "end-to-end budget"};
    e2e.expect(p1.ok, "dataset (500) -> train -> optimize (surrogate, 100 x 200) -> report succeeded");
    e2e.expect(p1.total < 60.0,
               fmt("total %.2f s (< 60 s); dataset %.2f s", p1.total, p1.dataset) +
                   fmt(", train %.2f s, optimize %.2f s", p1.train, p1.optimize) + fmt(", report %.2f s", p1.report));
    results.push_back(e2e);

    std::sort(results.begin(), results.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %d %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
        for (const auto& n : r.notes) std::printf("       %s\n", n.c_str());
        all = all && r.passed;
    }
    std::printf("%s\n", all ? "all acceptance criteria passed" : "some acceptance criteria FAILED");
    return all ? 0 : 1;
}
