#include "thermoharvest/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    [[nodiscard]] double map(double v) const { return log ? std::log10(v) : v; }
    [[nodiscard]] double unmap(double u) const { return log ? std::pow(10.0, u) : u; }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis fit_axis(const std::vector<PlotSeries>& series, bool use_x, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], log && use_x) || !usable(s.y[i], log && !use_x)) {
                continue;
            }
            const double v = use_x ? s.x[i] : s.y[i];
            const double u = log ? std::log10(v) : v;
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo <= 1e-300 * std::max(1.0, std::abs(hi))) {
        const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
        lo -= pad;
        hi += pad;
    } else {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

std::string render(const PlotSpec& spec, const std::vector<PlotSeries>& series, const std::string& provenance,
                   bool scatter) {
    const Axis ax = fit_axis(series, true, spec.log_x);
    const Axis ay = fit_axis(series, false, spec.log_y);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double u) { return kLeft + (u - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double u) { return kTop + ph - (u - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!-- " << escape_xml(provenance) << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed3(kWidth) << "\" height=\"" << fixed3(kHeight)
       << "\" viewBox=\"0 0 " << fixed3(kWidth) << ' ' << fixed3(kHeight) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fixed3(kWidth / 2) << "\" y=\"24.000\" text-anchor=\"middle\" font-size=\"15\">"
       << escape_xml(spec.title) << "</text>\n";
    os << "<rect x=\"" << fixed3(kLeft) << "\" y=\"" << fixed3(kTop) << "\" width=\"" << fixed3(pw) << "\" height=\""
       << fixed3(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double ux = ax.lo + (ax.hi - ax.lo) * i / kTicks;
        const double x = px(ux);
        os << "<line x1=\"" << fixed3(x) << "\" y1=\"" << fixed3(kTop + ph) << "\" x2=\"" << fixed3(x) << "\" y2=\""
           << fixed3(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fixed3(x) << "\" y=\"" << fixed3(kTop + ph + 20) << "\" text-anchor=\"middle\" font-size=\"11\">"
           << tick_label(ax.unmap(ux)) << "</text>\n";
        const double uy = ay.lo + (ay.hi - ay.lo) * i / kTicks;
        const double y = py(uy);
        os << "<line x1=\"" << fixed3(kLeft - 5) << "\" y1=\"" << fixed3(y) << "\" x2=\"" << fixed3(kLeft) << "\" y2=\""
           << fixed3(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fixed3(kLeft - 8) << "\" y=\"" << fixed3(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << tick_label(ay.unmap(uy)) << "</text>\n";
    }
    os << "<text x=\"" << fixed3(kLeft + pw / 2) << "\" y=\"" << fixed3(kHeight - 14)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(spec.x_label) << "</text>\n";
    os << "<text x=\"18.000\" y=\"" << fixed3(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18.000 "
       << fixed3(kTop + ph / 2) << ")\">" << escape_xml(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (scatter) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) {
                    continue;
                }
                os << "<circle cx=\"" << fixed3(px(ax.map(s.x[i]))) << "\" cy=\"" << fixed3(py(ay.map(s.y[i])))
                   << "\" r=\"3.000\" fill=\"" << color << "\" fill-opacity=\"0.8\"/>\n";
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.500\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) {
                    continue;
                }
                os << (first ? "" : " ") << fixed3(px(ax.map(s.x[i]))) << ',' << fixed3(py(ay.map(s.y[i])));
                first = false;
            }
            os << "\"/>\n";
        }
        if (!s.label.empty()) {
            const double ly = kTop + 16 + 16.0 * static_cast<double>(k);
            const double lx = kLeft + pw - 150;
            os << "<rect x=\"" << fixed3(lx) << "\" y=\"" << fixed3(ly - 9) << "\" width=\"10.000\" height=\"10.000\" fill=\""
               << color << "\"/>\n";
            os << "<text x=\"" << fixed3(lx + 16) << "\" y=\"" << fixed3(ly) << "\" font-size=\"11\">"
               << escape_xml(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

ManifestEntry hash_file(const std::filesystem::path& dir, const std::string& name) {
    const std::string content = read_text_file(dir / name);
    return {name, content.size(), sha256_hex(content)};
}

std::string summary_from_json(const std::filesystem::path& file, const std::vector<std::string>& keys) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(file));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": not valid JSON (" + e.what() + ")");
    }
    std::string out;
    for (const auto& key : keys) {
        const nlohmann::json* node = &doc;
        std::size_t start = 0;
        bool found = true;
        while (found) {
            const std::size_t dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!node->is_object() || !node->contains(part)) {
                found = false;
                break;
            }
            node = &node->at(part);
            if (dot == std::string::npos) {
                break;
            }
            start = dot + 1;
        }
        if (!found) {
            continue;
        }
        out += "| " + key + " | ";
        out += node->is_number() ? format_double(node->get<double>()) : node->dump();
        out += " |\n";
    }
    if (out.empty()) {
        return out;
    }
    return "| quantity | value |\n|---|---|\n" + out;
}

std::string csv_as_table(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    std::string out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::string row = "|";
        std::size_t cells = 1;
        for (char c : line) {
            if (c == ',') {
                row += " |";
                ++cells;
            } else {
                if (row.back() == '|') {
                    row += ' ';
                }
                row += c;
            }
        }
        out += row + " |\n";
        if (header) {
            out += "|";
            for (std::size_t i = 0; i < cells; ++i) {
                out += "---|";
            }
            out += "\n";
            header = false;
        }
    }
    return out;
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series, const std::string& provenance) {
    return render(spec, series, provenance, false);
}

std::string svg_scatter_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                             const std::string& provenance) {
    return render(spec, series, provenance, true);
}

const std::vector<std::string>& known_output_files() {
    static const std::vector<std::string> names{
        "simulate.json", "spectrum.csv",  "spectrum.svg",    "dataset.csv", "dataset.json",
        "surrogate.json", "cv_metrics.csv", "predictions.csv", "front.csv",   "generations.csv",
        "front.svg",      "knee.json",      "validate.csv"};
    return names;
}

std::string manifest_json(const ReportBundle& bundle, std::uint64_t seed, const std::string& ledger) {
    nlohmann::ordered_json doc;
    doc["provenance"] = {{"artifact_version", kArtifactVersion}, {"seed", seed}, {"ledger_version", ledger}};
    doc["files"] = nlohmann::ordered_json::array();
    for (const auto& f : bundle.files) {
        doc["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    }
    return doc.dump(2) + "\n";
}

void verify_report(const ReportBundle& bundle) {
    for (const auto& f : bundle.files) {
        const auto p = bundle.directory / f.path;
        if (!std::filesystem::exists(p)) {
            throw IoError("manifest lists missing file " + p.string());
        }
        const auto got = hash_file(bundle.directory, f.path);
        if (got.bytes != f.bytes || got.sha256 != f.sha256) {
            throw IoError("checksum mismatch for " + p.string());
        }
    }
}

ReportBundle build_report(const std::filesystem::path& directory, std::uint64_t seed, const std::string& ledger) {
    if (!std::filesystem::is_directory(directory)) {
        throw IoError("report directory " + directory.string() + " does not exist");
    }
    std::vector<std::string> names;
    for (const auto& n : known_output_files()) {
        if (std::filesystem::is_regular_file(directory / n)) {
            names.push_back(n);
        }
    }
    std::vector<std::string> sweeps;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        const std::string n = entry.path().filename().string();
        if (entry.is_regular_file() && n.rfind("sweep_", 0) == 0 &&
            (entry.path().extension() == ".csv" || entry.path().extension() == ".svg")) {
            sweeps.push_back(n);
        }
    }
    std::sort(sweeps.begin(), sweeps.end());
    names.insert(names.end(), sweeps.begin(), sweeps.end());
    if (names.empty()) {
        throw IoError("nothing to report in " + directory.string());
    }

    ReportBundle bundle;
    bundle.directory = directory;
    for (const auto& n : names) {
        bundle.files.push_back(hash_file(directory, n));
    }

    std::string md = "<!-- " + provenance_comment(seed, ledger) + " -->\n# thermoharvest report\n\n";
    md += "Artifact " + std::string(kArtifactVersion) + ", seed " + std::to_string(seed) + ", calibration ledger " +
          ledger + ".\n\n";
    if (std::filesystem::exists(directory / "simulate.json")) {
        md += "## Single design\n\n";
        md += summary_from_json(directory / "simulate.json",
                                {"metrics.max_enhancement", "metrics.absorbed_power_W", "metrics.dT_K",
                                 "metrics.hot_temp_C", "metrics.cold_temp_C", "metrics.voc_V", "metrics.pout_W",
                                 "metrics.pout_density_mW_cm2", "metrics.r_int_ohm", "operating_point.delta_T_K",
                                 "operating_point.power_W"});
        md += "\n";
    }
    if (std::filesystem::exists(directory / "cv_metrics.csv")) {
        md += "## Surrogate cross-validation\n\n" + csv_as_table(directory / "cv_metrics.csv") + "\n";
    }
    if (std::filesystem::exists(directory / "knee.json")) {
        md += "## Selected design (knee of the re-evaluated front)\n\n";
        md += summary_from_json(directory / "knee.json",
                                {"front_size", "hypervolume", "metrics.dT_K", "metrics.pout_W", "metrics.tdev_m",
                                 "design.gap_m", "design.flare_deg", "design.tspacer_m", "design.hte_m"});
        md += "\n";
    }
    if (std::filesystem::exists(directory / "validate.csv")) {
        md += "## Oracle checks\n\n" + csv_as_table(directory / "validate.csv") + "\n";
    }
    md += "## Files\n\n| file | bytes | sha256 |\n|---|---|---|\n";
    for (const auto& f : bundle.files) {
        md += "| " + f.path + " | " + std::to_string(f.bytes) + " | " + f.sha256 + " |\n";
    }
    write_text_file(directory / "report.md", md);
    bundle.files.push_back(hash_file(directory, "report.md"));

    write_text_file(directory / "manifest.json", manifest_json(bundle, seed, ledger));
    verify_report(bundle);
    return bundle;
}

}  // namespace thermoharvest
