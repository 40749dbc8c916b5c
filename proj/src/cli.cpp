#include "thermoharvest/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "thermoharvest/config.hpp"
#include "thermoharvest/error.hpp"
#include "thermoharvest/moo.hpp"
#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/report.hpp"
#include "thermoharvest/surrogate.hpp"
#include "thermoharvest/util.hpp"
#include "thermoharvest/validation.hpp"

namespace thermoharvest {

namespace {

using ojson = nlohmann::ordered_json;

struct GlobalFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::string out_dir;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

/// Everything a subcommand needs, resolved once.
struct Context {
    RunConfig config;
    Calibration cal;
    std::size_t workers = 1;
    std::filesystem::path out_dir;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    [[nodiscard]] std::uint64_t seed() const { return config.seed; }
    [[nodiscard]] const std::string& ledger() const { return cal.version; }
    [[nodiscard]] std::string comment() const { return provenance_comment(seed(), ledger()); }

    [[nodiscard]] ojson provenance() const {
        return {{"artifact_version", kArtifactVersion}, {"seed", seed()}, {"ledger_version", ledger()}};
    }

    [[nodiscard]] std::string stamped(const std::string& json_text) const {
        auto doc = ojson::parse(json_text);
        doc["provenance"] = provenance();
        return doc.dump(2) + "\n";
    }

    void write(const std::string& name, const std::string& content) const {
        write_text_file(out_dir / name, content);
        *out << "wrote " << (out_dir / name).string() << '\n';
    }
};

Context make_context(const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.config = flags.config_path.empty() ? parse_config("{}", std::filesystem::current_path())
                                           : load_config(flags.config_path);
    if (flags.seed_opt->count() > 0) {
        ctx.config.seed = flags.seed;
        ctx.config.provenance_log.push_back("flag seed = " + std::to_string(flags.seed));
    }
    if (flags.workers_opt->count() > 0) {
        ctx.config.workers = flags.workers;
        ctx.config.provenance_log.push_back("flag workers = " + std::to_string(flags.workers));
    }
    if (flags.out_opt->count() > 0) {
        ctx.config.output_dir = flags.out_dir;
        ctx.config.provenance_log.push_back("flag out = " + flags.out_dir);
    }
    for (const auto& w : ctx.config.warnings) {
        err << "warning: " << w << '\n';
    }
    ctx.workers = resolve_workers(ctx.config.workers);
    ctx.cal = resolve_calibration(ctx.config);
    ctx.out_dir = ctx.config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
    }
    std::string log = ctx.comment() + "\n";
    for (const auto& line : ctx.config.provenance_log) {
        log += line + "\n";
    }
    write_text_file(ctx.out_dir / "config.log", log);
    return ctx;
}

ojson design_json(const DesignPoint& d) {
    ojson j;
    const auto v = d.to_vector();
    const auto& names = design_column_names();
    for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
        j[std::string(names[i])] = v[i];
    }
    return j;
}

std::string design_csv_cells(const DesignPoint& d) {
    std::string s;
    for (double v : d.to_vector()) {
        s += format_double(v) + ',';
    }
    return s;
}

std::string design_csv_header() {
    std::string s;
    for (const auto& n : design_column_names()) {
        s += std::string(n) + ',';
    }
    return s;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const Context& ctx) {
    const auto& d = ctx.config.design;
    const auto m = evaluate_design(d, ctx.config.environment, ctx.config.incident, ctx.cal);
    const auto op = evaluate_operating_point(d, ctx.config.environment, ctx.config.incident, ctx.cal);
    const double density = power_density(m.p_out, ctx.cal.teg.junction_density);
    ojson doc;
    doc["provenance"] = ctx.provenance();
    doc["design"] = design_json(d);
    doc["metrics"] = {{"max_enhancement", m.max_enhancement},
                      {"absorbed_power_W", m.absorbed_power},
                      {"dT_K", m.delta_T_eff},
                      {"hot_temp_K", m.hot_temp},
                      {"cold_temp_K", m.cold_temp},
                      {"hot_temp_C", m.hot_temp - 273.15},
                      {"cold_temp_C", m.cold_temp - 273.15},
                      {"voc_V", m.v_oc},
                      {"r_int_ohm", m.internal_resistance},
                      {"pout_W", m.p_out},
                      {"pout_density_W_m2", density},
                      {"pout_density_mW_cm2", density * 0.1},
                      {"tdev_m", m.device_thickness}};
    doc["operating_point"] = ojson::parse(operating_point_json(op));
    doc["operating_point"]["iterations"] = op.iterations;
    const std::string text = doc.dump(2) + "\n";
    write_text_file(ctx.out_dir / "simulate.json", text);
    *ctx.out << text;
}

void cmd_spectrum(const Context& ctx) {
    const auto meta = metasurface_from_design(ctx.config.design, ctx.cal.optics);
    const auto grid = default_wavelength_grid();
    const auto spec = absorptance_spectrum(meta, ctx.cal.optics, grid);
    std::ostringstream csv;
    csv << ctx.comment() << '\n';
    write_spectrum_csv(csv, spec);
    ctx.write("spectrum.csv", csv.str());

    PlotSeries s{"absorptance", {}, spec.absorptance};
    for (double w : spec.wavelengths) {
        s.x.push_back(w * 1e6);
    }
    ctx.write("spectrum.svg", svg_line_plot({"Absorptance", "wavelength (um)", "A", true, false}, {s}, ctx.comment()));
}

struct SweepFlags {
    std::string variable;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    bool log_spacing = false;
    std::string plot_metric;
};

void cmd_sweep(const Context& ctx, const SweepFlags& flags, const CLI::App& sub) {
    auto settings = ctx.config.sweep;
    if (sub.count("--variable")) settings.variable = flags.variable;
    if (sub.count("--min")) settings.min = flags.min;
    if (sub.count("--max")) settings.max = flags.max;
    if (sub.count("--points")) settings.points = flags.points;
    if (sub.count("--log")) settings.log_spacing = flags.log_spacing;
    const std::size_t index = design_variable_index(settings.variable);
    if (settings.points < 2 || !(settings.min < settings.max) || (settings.log_spacing && !(settings.min > 0.0))) {
        throw ArgumentError("sweep needs points >= 2, min < max, and min > 0 with --log");
    }
    std::vector<double> values(settings.points);
    for (std::size_t i = 0; i < settings.points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(settings.points - 1);
        values[i] = settings.log_spacing
                        ? std::exp(std::log(settings.min) + f * (std::log(settings.max) - std::log(settings.min)))
                        : settings.min + f * (settings.max - settings.min);
    }
    values.back() = settings.max;
    const auto metrics = sweep_variable(ctx.config.design, settings.variable, values, ctx.config.environment,
                                        ctx.config.incident, ctx.cal);

    std::string plot_metric = flags.plot_metric;
    if (plot_metric.empty()) {
        const bool optical = settings.variable == "gap_m" || settings.variable == "flare_deg" ||
                             settings.variable.rfind("arm", 0) == 0;
        plot_metric = optical ? "max_enh" : "dT_K";
    }
    const auto& cols = metric_column_names();
    if (std::find(cols.begin(), cols.end(), plot_metric) == cols.end()) {
        throw ArgumentError("--plot-metric: unknown metric column \"" + plot_metric + "\"");
    }

    std::ostringstream csv;
    csv << ctx.comment() << '\n' << settings.variable;
    for (const auto& c : cols) {
        csv << ',' << c;
    }
    csv << ",rint_ohm,lambda_r2_m,fwhm2_m\n";
    PlotSeries series{plot_metric, values, {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto v = ctx.config.design.to_vector();
        v[index] = values[i];
        const auto meta = metasurface_from_design(DesignPoint::from_vector(v), ctx.cal.optics);
        const auto& g = meta.groups.at(1);
        csv << format_double(values[i]);
        for (const auto& c : cols) {
            csv << ',' << format_double(metric_value(metrics[i], c));
        }
        csv << ',' << format_double(metrics[i].internal_resistance) << ','
            << format_double(resonance_wavelength(g.arm_length, meta.n_eff)) << ','
            << format_double(group_fwhm(g, meta.n_eff, ctx.cal.optics)) << '\n';
        series.y.push_back(metric_value(metrics[i], plot_metric));
    }
    ctx.write("sweep_" + settings.variable + ".csv", csv.str());
    const PlotSpec spec{plot_metric + " vs " + settings.variable, settings.variable, plot_metric,
                        settings.log_spacing, plot_metric == "max_enh"};
    ctx.write("sweep_" + settings.variable + ".svg", svg_line_plot(spec, {series}, ctx.comment()));
}

void cmd_dataset(const Context& ctx, std::size_t samples_flag, const CLI::App& sub) {
    const std::size_t n = sub.count("--samples") ? samples_flag : ctx.config.sampler.samples;
    if (n < 1) {
        throw ArgumentError("--samples must be >= 1");
    }
    const auto ds = generate_dataset(ctx.config.bounds, n, ctx.seed(), ctx.config.environment,
                                     ctx.config.incident, ctx.cal, ctx.workers);
    std::ostringstream csv;
    write_dataset_csv(csv, ds);
    ctx.write("dataset.csv", csv.str());
    ctx.write("dataset.json", ctx.stamped(dataset_sidecar_json(ds)));
}

std::filesystem::path input_path(const Context& ctx, const std::string& flag, const char* fallback) {
    const std::filesystem::path p = flag.empty() ? ctx.out_dir / fallback : std::filesystem::path(flag);
    if (!std::filesystem::is_regular_file(p)) {
        throw IoError("input file " + p.string() + " does not exist");
    }
    return p;
}

Dataset load_dataset(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw IoError("cannot open " + p.string());
    }
    try {
        return read_dataset_csv(in);
    } catch (const Error& e) {
        rethrow_with_context(e, p.string());
    }
}

SurrogateBundle load_surrogate(const Context& ctx, const std::filesystem::path& p) {
    auto bundle = surrogate_from_json(read_text_file(p));
    if (bundle.ledger_version != ctx.ledger()) {
        throw ConfigError(p.string() + " was trained against ledger " + bundle.ledger_version + ", current ledger is " +
                          ctx.ledger());
    }
    return bundle;
}

void cmd_train(const Context& ctx, const std::string& dataset_flag) {
    const auto ds = load_dataset(input_path(ctx, dataset_flag, "dataset.csv"));
    CvOptions opts;
    opts.folds = ctx.config.gpr.folds;
    opts.seed = derive_seed(ctx.seed(), "train");
    opts.tune.restarts = ctx.config.gpr.restarts;
    opts.tune.noise_variance = ctx.config.gpr.noise_variance;
    opts.tune.max_evaluations = ctx.config.gpr.max_evaluations;
    opts.tune.max_rows = ctx.config.gpr.max_tune_rows;
    opts.tune.seed = derive_seed(opts.seed, "tune");
    auto bundle = train_surrogate(ds, ctx.config.gpr.targets, opts, ctx.workers);
    bundle.ledger_version = ctx.ledger();
    bundle.seed = ctx.seed();
    ctx.write("surrogate.json", ctx.stamped(surrogate_to_json(bundle)));
    std::ostringstream csv;
    csv << ctx.comment() << "\ntarget,folds,r_squared,rmse\n";
    for (const auto& t : ctx.config.gpr.targets) {
        const auto& m = bundle.cv.at(t);
        csv << t << ',' << opts.folds << ',' << format_double(m.r_squared) << ',' << format_double(m.rmse) << '\n';
        *ctx.out << t << ": " << opts.folds << "-fold CV R^2 = " << format_double(m.r_squared) << '\n';
    }
    ctx.write("cv_metrics.csv", csv.str());
}

void cmd_predict(const Context& ctx, const std::string& input_flag, const std::string& surrogate_flag) {
    if (input_flag.empty()) {
        throw ArgumentError("predict needs --input <designs.csv>");
    }
    const auto bundle = load_surrogate(ctx, input_path(ctx, surrogate_flag, "surrogate.json"));
    std::ifstream in(input_flag);
    if (!in) {
        throw IoError("cannot open " + input_flag);
    }
    const auto designs = read_design_csv(in);
    const Eigen::MatrixXd x = design_matrix(designs);
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> columns;
    std::ostringstream csv;
    csv << ctx.comment() << '\n' << design_csv_header();
    bool first = true;
    for (const auto& [name, model] : bundle.models) {
        Eigen::VectorXd mean;
        Eigen::VectorXd var;
        gpr_predict_batch(model, x, mean, &var);
        columns.emplace_back(std::move(mean), std::move(var));
        csv << (first ? "" : ",") << name << ',' << name << "_std";
        first = false;
    }
    csv << '\n';
    for (std::size_t i = 0; i < designs.size(); ++i) {
        csv << design_csv_cells(designs[i]);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto r = static_cast<Eigen::Index>(i);
            csv << (c ? "," : "") << format_double(columns[c].first(r)) << ','
                << format_double(std::sqrt(std::max(0.0, columns[c].second(r))));
        }
        csv << '\n';
    }
    ctx.write("predictions.csv", csv.str());
}

struct OptimizeFlags {
    std::string evaluator;
    std::string surrogate;
    std::size_t population = 0;
    std::size_t generations = 0;
};

void cmd_optimize(const Context& ctx, const OptimizeFlags& flags, const CLI::App& sub) {
    NsgaConfig cfg = ctx.config.nsga;
    if (sub.count("--evaluator")) {
        cfg.evaluator = flags.evaluator == "direct" ? EvaluatorKind::Direct : EvaluatorKind::Surrogate;
    }
    if (sub.count("--population")) cfg.population = flags.population;
    if (sub.count("--generations")) cfg.generations = flags.generations;
    cfg.seed = derive_seed(ctx.seed(), "optimize");
    cfg.workers = ctx.workers;
    cfg.validate();

    SurrogateBundle bundle;
    DesignObjective objective;
    if (cfg.evaluator == EvaluatorKind::Surrogate) {
        bundle = load_surrogate(ctx, input_path(ctx, flags.surrogate, "surrogate.json"));
        for (const char* t : {"dT_K", "pout_W"}) {
            if (!bundle.models.count(t)) {
                throw ConfigError("surrogate has no model for " + std::string(t));
            }
        }
        objective = surrogate_objective(bundle);
    } else {
        objective = direct_objective(ctx.config.environment, ctx.config.incident, ctx.cal);
    }
    const auto result = evolve(ctx.config.bounds, cfg, objective);
    const auto front = reevaluate_front(result.front, ctx.config.environment, ctx.config.incident, ctx.cal);

    std::ostringstream front_csv;
    write_front_csv(front_csv, front, ctx.seed(), ctx.ledger());
    ctx.write("front.csv", front_csv.str());
    std::ostringstream log_csv;
    write_generation_log_csv(log_csv, result.log, ctx.seed(), ctx.ledger());
    ctx.write("generations.csv", log_csv.str());

    PlotSeries predicted{cfg.evaluator == EvaluatorKind::Surrogate ? "surrogate front" : "optimizer front", {}, {}};
    for (const auto& m : result.front.members) {
        predicted.x.push_back(-m.objectives[0]);
        predicted.y.push_back(-m.objectives[1]);
    }
    PlotSeries checked{"direct re-evaluation", {}, {}};
    for (const auto& m : front.members) {
        checked.x.push_back(-m.objectives[0]);
        checked.y.push_back(-m.objectives[1]);
    }
    ctx.write("front.svg", svg_scatter_plot({"Pareto front", "dT (K)", "P_out per junction (W)", false, false},
                                            {predicted, checked}, ctx.comment()));

    const std::size_t k = knee_point(front);
    const auto& knee = front.members.at(k);
    ojson doc;
    doc["provenance"] = ctx.provenance();
    doc["evaluator"] = cfg.evaluator == EvaluatorKind::Surrogate ? "surrogate" : "direct";
    doc["front_size"] = front.members.size();
    doc["hypervolume"] = front.hypervolume;
    doc["knee_index"] = k;
    DesignPoint::Vector v{};
    std::copy(knee.x.begin(), knee.x.end(), v.begin());
    doc["design"] = design_json(DesignPoint::from_vector(v));
    doc["metrics"] = {{"dT_K", -knee.objectives[0]}, {"pout_W", -knee.objectives[1]}, {"tdev_m", knee.objectives[2]}};
    ctx.write("knee.json", doc.dump(2) + "\n");
    *ctx.out << "front: " << front.members.size() << " designs, knee dT = " << format_double(-knee.objectives[0])
             << " K, P_out = " << format_double(-knee.objectives[1]) << " W\n";
}

bool cmd_validate(const Context& ctx) {
    const auto checks = run_oracle_suite(ctx.cal, derive_seed(ctx.seed(), "validate"));
    std::ostringstream csv;
    write_validation_csv(csv, checks, ctx.seed(), ctx.ledger());
    write_text_file(ctx.out_dir / "validate.csv", csv.str());
    bool ok = true;
    for (const auto& c : checks) {
        char line[256];
        std::snprintf(line, sizeof line, "[%s] %-66s error %-12.4g tol %.4g", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.error, c.tolerance);
        *ctx.out << line << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
        ok = ok && c.passed;
    }
    return ok;
}

void cmd_report(const Context& ctx) {
    const auto bundle = build_report(ctx.out_dir, ctx.seed(), ctx.ledger());
    *ctx.out << "report: " << bundle.files.size() << " files verified, manifest at "
             << (ctx.out_dir / "manifest.json").string() << '\n';
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    err << j.dump() << std::endl;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Thermoplasmonic-thermoelectric harvester model: simulate, sample, fit surrogates, optimize."};
    app.name("thermoharvest");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "JSON run configuration");
    flags.seed_opt = app.add_option("--seed", flags.seed, "master seed (overrides the config)");
    flags.workers_opt = app.add_option("--workers", flags.workers, "worker threads (0: THERMOHARVEST_WORKERS or 1)");
    flags.out_opt = app.add_option("--out", flags.out_dir, "output directory (overrides the config)");

    auto* simulate = app.add_subcommand("simulate", "evaluate one design, write simulate.json");
    auto* spectrum = app.add_subcommand("spectrum", "absorptance spectrum CSV and SVG");

    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "one-variable scan CSV and SVG");
    sweep->add_option("--variable", sweep_flags.variable, "design column to vary");
    sweep->add_option("--min", sweep_flags.min);
    sweep->add_option("--max", sweep_flags.max);
    sweep->add_option("--points", sweep_flags.points);
    sweep->add_flag("--log", sweep_flags.log_spacing, "log-spaced values");
    sweep->add_option("--plot-metric", sweep_flags.plot_metric, "metric column drawn in the SVG");

    std::size_t samples = 0;
    auto* dataset = app.add_subcommand("dataset", "Latin-hypercube dataset CSV and sidecar");
    dataset->add_option("--samples", samples);

    std::string dataset_path;
    auto* train = app.add_subcommand("train", "fit GP surrogates with k-fold CV");
    train->add_option("--dataset", dataset_path, "dataset CSV (default <out>/dataset.csv)");

    std::string predict_input;
    std::string surrogate_path;
    auto* predict = app.add_subcommand("predict", "batch surrogate predictions");
    predict->add_option("--input", predict_input, "CSV with design columns")->required();
    predict->add_option("--surrogate", surrogate_path, "surrogate JSON (default <out>/surrogate.json)");

    OptimizeFlags opt_flags;
    auto* optimize = app.add_subcommand("optimize", "NSGA-II over the design bounds");
    optimize->add_option("--evaluator", opt_flags.evaluator)->check(CLI::IsMember({"surrogate", "direct"}));
    optimize->add_option("--surrogate", opt_flags.surrogate, "surrogate JSON (default <out>/surrogate.json)");
    optimize->add_option("--population", opt_flags.population);
    optimize->add_option("--generations", opt_flags.generations);

    auto* validate = app.add_subcommand("validate", "run the oracle checks");
    auto* report = app.add_subcommand("report", "manifest and summary of the outputs in <out>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what());
        return 2;
    }

    try {
        const Context ctx = make_context(flags, out, err);
        if (simulate->parsed()) {
            cmd_simulate(ctx);
        } else if (spectrum->parsed()) {
            cmd_spectrum(ctx);
        } else if (sweep->parsed()) {
            cmd_sweep(ctx, sweep_flags, *sweep);
        } else if (dataset->parsed()) {
            cmd_dataset(ctx, samples, *dataset);
        } else if (train->parsed()) {
            cmd_train(ctx, dataset_path);
        } else if (predict->parsed()) {
            cmd_predict(ctx, predict_input, surrogate_path);
        } else if (optimize->parsed()) {
            cmd_optimize(ctx, opt_flags, *optimize);
        } else if (validate->parsed()) {
            if (!cmd_validate(ctx)) {
                emit_error(err, "validation", "one or more oracle checks failed (see validate.csv)");
                return 1;
            }
        } else if (report->parsed()) {
            cmd_report(ctx);
        }
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "internal", e.what());
        return 1;
    }
    return 0;
}

}  // namespace thermoharvest
