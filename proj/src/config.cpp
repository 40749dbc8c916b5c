#include "thermoharvest/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "thermoharvest/error.hpp"
#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

using json = nlohmann::json;

std::string show(double v) { return format_double(v); }
std::string show(std::size_t v, int) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(const std::string& v) { return "\"" + v + "\""; }
std::string show(const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + show(v[i]);
    }
    return s + "]";
}
std::string show(const std::pair<double, double>& v) { return "[" + show(v.first) + ", " + show(v.second) + "]"; }

/// One JSON object of the config. Every read marks its key as known; any key
/// left unread at `finish()` is an error.
class Section {
public:
    Section(const json* node, std::string prefix, RunConfig& cfg) : node_(node), prefix_(std::move(prefix)), cfg_(cfg) {
        if (node_ && !node_->is_object()) {
            throw ConfigError("config key '" + prefix_ + "' must be an object");
        }
    }

    template <typename T>
    void read(const std::string& key, T& target) {
        known_.insert(key);
        const std::string path = prefix_.empty() ? key : prefix_ + "." + key;
        if (!node_ || !node_->contains(key)) {
            cfg_.provenance_log.push_back("default " + path + " = " + render(target));
            return;
        }
        try {
            target = node_->at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + path + "' has the wrong type");
        }
        cfg_.provenance_log.push_back("set " + path + " = " + render(target));
    }

    [[nodiscard]] const json* child(const std::string& key) {
        known_.insert(key);
        if (!node_ || !node_->contains(key)) {
            return nullptr;
        }
        return &node_->at(key);
    }

    [[nodiscard]] std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    void finish() const {
        if (!node_) {
            return;
        }
        for (const auto& [key, _] : node_->items()) {
            if (!known_.count(key)) {
                throw ConfigError("unknown config key '" + path(key) + "'");
            }
        }
    }

private:
    template <typename T>
    static std::string render(const T& v) {
        if constexpr (std::is_same_v<T, std::size_t>) {
            return show(v, 0);
        } else {
            return show(v);
        }
    }

    const json* node_;
    std::string prefix_;
    RunConfig& cfg_;
    std::set<std::string> known_;
};

void warn_outside(RunConfig& cfg, std::string_view column, double lo, double hi, const char* unit) {
    const auto& r = cfg.bounds.ranges[design_variable_index(column)];
    if (r.first < lo * (1 - 1e-12) || r.second > hi * (1 + 1e-12)) {
        cfg.warnings.push_back("bounds." + std::string(column) + " " + show(r) + " exceeds the reference range [" +
                               show(lo) + ", " + show(hi) + "] " + unit);
    }
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    RunConfig cfg;
    Section top(&doc, "", cfg);
    top.read("seed", cfg.seed);
    top.read("workers", cfg.workers);
    std::string out_dir = cfg.output_dir.string();
    top.read("output_dir", out_dir);
    cfg.output_dir = out_dir;
    if (cfg.output_dir.is_relative() && !base_dir.empty()) {
        cfg.output_dir = base_dir / cfg.output_dir;
    }
    std::string ledger;
    top.read("calibration", ledger);
    if (!ledger.empty()) {
        cfg.calibration_path = ledger;
        if (cfg.calibration_path.is_relative() && !base_dir.empty()) {
            cfg.calibration_path = base_dir / cfg.calibration_path;
        }
        if (!std::filesystem::exists(cfg.calibration_path)) {
            throw ConfigError("calibration ledger '" + cfg.calibration_path.string() + "' does not exist");
        }
    }

    {
        Section s(top.child("design"), "design", cfg);
        auto v = cfg.design.to_vector();
        const auto& names = design_column_names();
        for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
            s.read(std::string(names[i]), v[i]);
        }
        s.finish();
        cfg.design = DesignPoint::from_vector(v);
    }
    {
        Section s(top.child("bounds"), "bounds", cfg);
        const auto& names = design_column_names();
        for (std::size_t i = 0; i < kDesignVariableCount; ++i) {
            s.read(std::string(names[i]), cfg.bounds.ranges[i]);
        }
        s.finish();
    }
    {
        Section s(top.child("environment"), "environment", cfg);
        s.read("ambient_K", cfg.environment.ambient_temp);
        s.read("skin_K", cfg.environment.skin_temp);
        s.read("h_conv_W_m2K", cfg.environment.convection_coeff);
        s.read("emissivity", cfg.environment.emissivity);
        s.finish();
    }
    {
        Section s(top.child("incident"), "incident", cfg);
        std::string kind = cfg.incident.kind == IncidentKind::Blackbody ? "blackbody" : "uniform";
        s.read("kind", kind);
        if (kind == "uniform") {
            cfg.incident.kind = IncidentKind::UniformBand;
        } else if (kind == "blackbody") {
            cfg.incident.kind = IncidentKind::Blackbody;
        } else {
            throw ConfigError("incident.kind must be \"uniform\" or \"blackbody\", got \"" + kind + "\"");
        }
        s.read("intensity_W_m2", cfg.incident.total_intensity);
        s.read("band_min_m", cfg.incident.band_min);
        s.read("band_max_m", cfg.incident.band_max);
        s.read("blackbody_K", cfg.incident.blackbody_temp);
        s.finish();
    }
    {
        Section s(top.child("sampler"), "sampler", cfg);
        s.read("samples", cfg.sampler.samples);
        s.finish();
    }
    {
        Section s(top.child("gpr"), "gpr", cfg);
        s.read("targets", cfg.gpr.targets);
        s.read("folds", cfg.gpr.folds);
        s.read("restarts", cfg.gpr.restarts);
        s.read("noise_variance", cfg.gpr.noise_variance);
        s.read("max_evaluations", cfg.gpr.max_evaluations);
        s.read("max_tune_rows", cfg.gpr.max_tune_rows);
        s.finish();
    }
    {
        Section s(top.child("nsga"), "nsga", cfg);
        s.read("population", cfg.nsga.population);
        s.read("generations", cfg.nsga.generations);
        s.read("crossover_prob", cfg.nsga.crossover_prob);
        s.read("sbx_eta", cfg.nsga.sbx_eta);
        s.read("mutation_prob", cfg.nsga.mutation_prob);
        s.read("mutation_eta", cfg.nsga.mutation_eta);
        std::string evaluator = cfg.nsga.evaluator == EvaluatorKind::Direct ? "direct" : "surrogate";
        s.read("evaluator", evaluator);
        if (evaluator == "surrogate") {
            cfg.nsga.evaluator = EvaluatorKind::Surrogate;
        } else if (evaluator == "direct") {
            cfg.nsga.evaluator = EvaluatorKind::Direct;
        } else {
            throw ConfigError("nsga.evaluator must be \"surrogate\" or \"direct\", got \"" + evaluator + "\"");
        }
        s.finish();
    }
    {
        Section s(top.child("sweep"), "sweep", cfg);
        s.read("variable", cfg.sweep.variable);
        s.read("min", cfg.sweep.min);
        s.read("max", cfg.sweep.max);
        s.read("points", cfg.sweep.points);
        s.read("log_spacing", cfg.sweep.log_spacing);
        s.finish();
    }
    top.finish();

    // Invariants, each reported with its field.
    try {
        cfg.bounds.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("bounds: ") + e.what());
    }
    try {
        validate_design(cfg.design);
    } catch (const Error& e) {
        throw ConfigError(std::string("design: ") + e.what());
    }
    try {
        cfg.environment.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("environment: ") + e.what());
    }
    try {
        cfg.incident.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("incident: ") + e.what());
    }
    cfg.nsga.validate();
    if (cfg.sampler.samples < 1 || cfg.sampler.samples > 100000) {
        throw ConfigError("sampler.samples must lie in [1, 100000], got " + std::to_string(cfg.sampler.samples));
    }
    if (cfg.gpr.targets.empty()) {
        throw ConfigError("gpr.targets must list at least one metric column");
    }
    for (const auto& t : cfg.gpr.targets) {
        const auto& cols = metric_column_names();
        if (std::find(cols.begin(), cols.end(), t) == cols.end()) {
            throw ConfigError("gpr.targets: unknown metric column \"" + t + "\"");
        }
    }
    if (cfg.gpr.folds < 2) {
        throw ConfigError("gpr.folds must be >= 2");
    }
    if (cfg.gpr.restarts < 1) {
        throw ConfigError("gpr.restarts must be >= 1");
    }
    if (!(cfg.gpr.noise_variance > 0.0)) {
        throw ConfigError("gpr.noise_variance must be > 0");
    }
    if (cfg.sweep.points < 2 || !(cfg.sweep.min < cfg.sweep.max)) {
        throw ConfigError("sweep needs points >= 2 and min < max");
    }
    if (cfg.sweep.log_spacing && !(cfg.sweep.min > 0.0)) {
        throw ConfigError("sweep.log_spacing needs sweep.min > 0");
    }
    try {
        (void)design_variable_index(cfg.sweep.variable);
    } catch (const Error&) {
        throw ConfigError("sweep.variable: unknown design column \"" + cfg.sweep.variable + "\"");
    }

    warn_outside(cfg, "gap_m", 2e-9, 20e-9, "m");
    warn_outside(cfg, "flare_deg", 25.0, 40.0, "deg");
    warn_outside(cfg, "tmetal_m", 40e-9, 60e-9, "m");
    warn_outside(cfg, "tspacer_m", 30e-9, 60e-9, "m");
    warn_outside(cfg, "hte_m", 5e-6, 10e-6, "m");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.parent_path());
}

Calibration resolve_calibration(const RunConfig& config) {
    if (config.calibration_path.empty()) {
        return default_calibration();
    }
    auto cal = load_calibration(config.calibration_path.string());
    calibrate(cal, config.environment);
    return cal;
}

}  // namespace thermoharvest
