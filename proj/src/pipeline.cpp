#include "thermoharvest/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "thermoharvest/error.hpp"
#include "thermoharvest/materials.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

const std::vector<double>& optics_grid() {
    static const std::vector<double> grid = default_wavelength_grid(512);
    return grid;
}

std::string describe(const DesignPoint& d) {
    const auto v = d.to_vector();
    const auto& names = design_column_names();
    std::string out = "design {";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + std::string(names[i]) + "=" + format_double(v[i]);
    }
    return out + "}";
}

IncidentSpectrum anchor_incident(const Calibration& cal) {
    auto inc = default_incident();
    inc.total_intensity = cal.thermal.anchor_intensity;
    return inc;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string& text, std::size_t line_no) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw IoError("line " + std::to_string(line_no) + ": '" + text + "' is not a number");
    }
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::uint64_t seed = 0;
    std::string ledger;
};

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                if (tok.rfind("seed=", 0) == 0) {
                    t.seed = std::stoull(tok.substr(5));
                } else if (tok.rfind("ledger=", 0) == 0) {
                    t.ledger = tok.substr(7);
                }
            }
            continue;
        }
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                          " columns, found " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            row.push_back(parse_number(c, line_no));
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) {
        throw IoError("CSV has no header line");
    }
    return t;
}

std::size_t column_of(const CsvTable& t, std::string_view name) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) {
            return i;
        }
    }
    throw IoError("CSV is missing column '" + std::string(name) + "'");
}

}  // namespace

double hotspot_power(double absorbed_power, double spacer_thickness, const CouplingCalibration& coupling) {
    if (!(spacer_thickness > 0.0)) {
        throw DomainError("spacer thickness must be positive");
    }
    const double t = spacer_thickness;
    return absorbed_power * t / (t + coupling.confinement_length) * std::exp(-t / coupling.near_field_decay_length);
}

void calibrate(Calibration& cal, const Environment& env) {
    env.validate();
    const auto ref = default_design();
    const auto meta = metasurface_from_design(ref, cal.optics);
    cal.optics.eta0 =
        solve_enhancement_prefactor(meta, cal.optics, cal.optics.anchor_enhancement, cal.optics.anchor_wavelength);

    const double p_abs = absorbed_power(meta, cal.optics, anchor_incident(cal), optics_grid());
    const double p_hs = hotspot_power(p_abs, ref.spacer_thickness, cal.coupling);
    if (!(p_hs > 0.0)) {
        throw ConfigError("reference design absorbs no power; cannot calibrate");
    }
    const auto r = device_resistances(ref, env, cal);
    const double th = cal.thermal.target_hot_temp;
    const double tc = cal.thermal.target_cold_temp;
    const double kappa = ((th - env.ambient_temp) / r.top_loss + (th - tc) / r.hot_to_cold) / p_hs;
    const double g_textile =
        ((th - tc) / r.hot_to_cold - (tc - env.skin_temp) / r.skin_path) / (tc - cal.thermal.textile_temp);
    if (!(kappa > 0.0) || !(g_textile > 0.0) || !std::isfinite(g_textile)) {
        throw ConfigError("target temperatures are not reachable with the ledger constants (kappa=" +
                          format_double(kappa) + ", G_textile=" + format_double(g_textile) + ")");
    }
    cal.thermal.kappa = kappa;
    cal.thermal.textile_resistance = 1.0 / g_textile;
    cal.solved = true;
}

const Calibration& default_calibration() {
    static const Calibration cal = [] {
        auto c = builtin_calibration_unsolved();
        calibrate(c);
        return c;
    }();
    return cal;
}

double derived_mismatch(const Calibration& cal) {
    const std::pair<const char*, double> solved[] = {
        {"optics.eta0", cal.optics.eta0},
        {"thermal.kappa", cal.thermal.kappa},
        {"thermal.textile_resistance_K_W", cal.thermal.textile_resistance},
    };
    double worst = 0.0;
    for (const auto& [name, value] : solved) {
        auto it = cal.recorded_derived.find(name);
        if (it == cal.recorded_derived.end()) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, std::abs(it->second - value) / std::max(std::abs(value), 1e-300));
    }
    return worst;
}

PerformanceMetrics evaluate_design(const DesignPoint& design, const Environment& env,
                                   const IncidentSpectrum& incident, const Calibration& cal) {
    try {
        validate_design(design);
        const auto meta = metasurface_from_design(design, cal.optics);
        PerformanceMetrics m;
        m.max_enhancement = peak_field_enhancement(meta, cal.optics).max_enhancement;
        m.absorbed_power = absorbed_power(meta, cal.optics, incident, optics_grid());
        const double p_hs = hotspot_power(m.absorbed_power, design.spacer_thickness, cal.coupling);
        const auto sol = solve_steady(build_network(design, env, p_hs, cal));
        const auto te = te_properties(cal.teg.material);
        const TeLegGeometry geom{design.te_height, design.te_width, cal.teg.legs_in_series};
        m.hot_temp = sol.hot_temp;
        m.cold_temp = sol.cold_temp;
        m.delta_T_eff = std::abs(sol.delta_T);
        m.v_oc = open_circuit_voltage(te.seebeck, sol.delta_T);
        m.internal_resistance = internal_resistance(geom, te.electrical_conductivity);
        m.p_out = matched_power(m.v_oc, m.internal_resistance);
        m.device_thickness = design.device_thickness();
        return m;
    } catch (const Error& e) {
        rethrow_with_context(e, describe(design));
    }
}

CoupledOperatingPoint evaluate_operating_point(const DesignPoint& design, const Environment& env,
                                               const IncidentSpectrum& incident, const Calibration& cal) {
    try {
        validate_design(design);
        const auto meta = metasurface_from_design(design, cal.optics);
        const double p_abs = absorbed_power(meta, cal.optics, incident, optics_grid());
        const auto net = build_network(design, env, hotspot_power(p_abs, design.spacer_thickness, cal.coupling), cal);
        const auto te = te_properties(cal.teg.material);
        const TeLegGeometry geom{design.te_height, design.te_width, cal.teg.legs_in_series};
        CoupledOptions opts;
        opts.junction_density = cal.teg.junction_density;
        return coupled_operating_point(net, te, geom, internal_resistance(geom, te.electrical_conductivity), opts);
    } catch (const Error& e) {
        rethrow_with_context(e, describe(design));
    }
}

std::vector<std::vector<double>> latin_hypercube(std::span<const std::pair<double, double>> box, std::size_t n,
                                                 std::uint64_t seed) {
    if (n == 0) {
        throw ArgumentError("Latin hypercube needs n >= 1");
    }
    RandomStream rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(box.size()));
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < box.size(); ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(perm);
        const auto [lo, hi] = box[d];
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
            out[i][d] = std::min(hi, lo + u * (hi - lo));
        }
    }
    return out;
}

std::vector<DesignPoint> sample_designs(const DesignBounds& bounds, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw ArgumentError("sample_designs needs n >= 1");
    }
    bounds.validate();
    const auto points = latin_hypercube(bounds.ranges, n, derive_seed(seed, "sample_designs"));
    std::vector<DesignPoint> out;
    out.reserve(n);
    for (const auto& p : points) {
        DesignPoint::Vector v{};
        std::copy(p.begin(), p.end(), v.begin());
        out.push_back(DesignPoint::from_vector(v));
    }
    return out;
}

Dataset generate_dataset(const DesignBounds& bounds, std::size_t n, std::uint64_t seed, const Environment& env,
                         const IncidentSpectrum& incident, const Calibration& cal, std::size_t workers) {
    if (n < 1 || n > 100000) {
        throw ArgumentError("dataset size must lie in [1, 100000], got " + std::to_string(n));
    }
    Dataset ds;
    ds.designs = sample_designs(bounds, n, seed);
    ds.metrics.resize(n);
    ds.seed = seed;
    ds.bounds = bounds;
    ds.ledger_version = cal.version;
    ds.model_version = std::string("thermoharvest-") + kArtifactVersion + "+ledger-" + cal.version;
    parallel_for(n, workers, [&](std::size_t i) { ds.metrics[i] = evaluate_design(ds.designs[i], env, incident, cal); });
    return ds;
}

const std::vector<std::string>& metric_column_names() {
    static const std::vector<std::string> names{"max_enh", "pabs_W", "dT_K", "voc_V", "pout_W", "tdev_m"};
    return names;
}

double metric_value(const PerformanceMetrics& m, std::string_view column) {
    if (column == "max_enh") return m.max_enhancement;
    if (column == "pabs_W") return m.absorbed_power;
    if (column == "dT_K") return m.delta_T_eff;
    if (column == "voc_V") return m.v_oc;
    if (column == "pout_W") return m.p_out;
    if (column == "tdev_m") return m.device_thickness;
    throw LookupError("unknown metric column '" + std::string(column) + "'");
}

void write_dataset_csv(std::ostream& os, const Dataset& dataset) {
    os << provenance_comment(dataset.seed, dataset.ledger_version) << '\n';
    bool first = true;
    for (auto name : design_column_names()) {
        os << (first ? "" : ",") << name;
        first = false;
    }
    for (const auto& name : metric_column_names()) {
        os << ',' << name;
    }
    os << '\n';
    for (std::size_t i = 0; i < dataset.designs.size(); ++i) {
        const auto v = dataset.designs[i].to_vector();
        for (std::size_t j = 0; j < v.size(); ++j) {
            os << (j ? "," : "") << format_double(v[j]);
        }
        for (const auto& name : metric_column_names()) {
            os << ',' << format_double(metric_value(dataset.metrics[i], name));
        }
        os << '\n';
    }
}

std::string dataset_sidecar_json(const Dataset& dataset) {
    nlohmann::ordered_json doc;
    doc["format"] = "thermoharvest-dataset";
    doc["artifact_version"] = kArtifactVersion;
    doc["model_version"] = dataset.model_version;
    doc["ledger_version"] = dataset.ledger_version;
    doc["seed"] = dataset.seed;
    doc["rows"] = dataset.designs.size();
    nlohmann::ordered_json bounds;
    const auto& names = design_column_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        bounds[std::string(names[i])] = {dataset.bounds.ranges[i].first, dataset.bounds.ranges[i].second};
    }
    doc["bounds"] = bounds;
    return doc.dump(2) + "\n";
}

Dataset read_dataset_csv(std::istream& in) {
    const auto t = read_csv(in);
    std::vector<std::string> expected;
    for (auto n : design_column_names()) {
        expected.emplace_back(n);
    }
    for (const auto& n : metric_column_names()) {
        expected.push_back(n);
    }
    if (t.header != expected) {
        throw IoError("dataset CSV header does not match the expected column list");
    }
    Dataset ds;
    ds.seed = t.seed;
    ds.ledger_version = t.ledger;
    for (std::size_t d = 0; d < kDesignVariableCount; ++d) {
        ds.bounds.ranges[d] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    for (const auto& row : t.rows) {
        DesignPoint::Vector v{};
        std::copy_n(row.begin(), kDesignVariableCount, v.begin());
        ds.designs.push_back(DesignPoint::from_vector(v));
        for (std::size_t d = 0; d < kDesignVariableCount; ++d) {
            ds.bounds.ranges[d].first = std::min(ds.bounds.ranges[d].first, v[d]);
            ds.bounds.ranges[d].second = std::max(ds.bounds.ranges[d].second, v[d]);
        }
        PerformanceMetrics m;
        const double* r = row.data() + kDesignVariableCount;
        m.max_enhancement = r[0];
        m.absorbed_power = r[1];
        m.delta_T_eff = r[2];
        m.v_oc = r[3];
        m.p_out = r[4];
        m.device_thickness = r[5];
        ds.metrics.push_back(m);
    }
    return ds;
}

std::vector<DesignPoint> read_design_csv(std::istream& in) {
    const auto t = read_csv(in);
    std::array<std::size_t, kDesignVariableCount> cols{};
    const auto& names = design_column_names();
    for (std::size_t d = 0; d < kDesignVariableCount; ++d) {
        cols[d] = column_of(t, names[d]);
    }
    std::vector<DesignPoint> out;
    for (const auto& row : t.rows) {
        DesignPoint::Vector v{};
        for (std::size_t d = 0; d < kDesignVariableCount; ++d) {
            v[d] = row[cols[d]];
        }
        out.push_back(DesignPoint::from_vector(v));
    }
    return out;
}

std::vector<PerformanceMetrics> sweep_variable(const DesignPoint& design, std::string_view column,
                                               std::span<const double> values, const Environment& env,
                                               const IncidentSpectrum& incident, const Calibration& cal) {
    const std::size_t idx = design_variable_index(column);
    std::vector<PerformanceMetrics> out;
    out.reserve(values.size());
    for (double x : values) {
        auto v = design.to_vector();
        v[idx] = x;
        out.push_back(evaluate_design(DesignPoint::from_vector(v), env, incident, cal));
    }
    return out;
}

}  // namespace thermoharvest
