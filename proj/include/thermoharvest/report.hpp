#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace thermoharvest {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

/// Self-contained SVG documents. Coordinates are printed with three decimals
/// so identical inputs give identical bytes. `provenance` goes into a comment.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series, const std::string& provenance);
std::string svg_scatter_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                             const std::string& provenance);

struct ManifestEntry {
    std::string path;  // relative to the bundle directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct ReportBundle {
    std::filesystem::path directory;
    std::vector<ManifestEntry> files;
};

/// Output names the tools know about, in manifest order.
const std::vector<std::string>& known_output_files();

/// Collects every known output present in `directory` (sweep_*.csv/svg
/// included), writes report.md and manifest.json, then re-reads everything
/// and checks sizes and digests. Throws IoError if nothing is there to report
/// or a check fails.
ReportBundle build_report(const std::filesystem::path& directory, std::uint64_t seed, const std::string& ledger);

/// Re-hashes every listed file; throws IoError naming the first mismatch.
void verify_report(const ReportBundle& bundle);

std::string manifest_json(const ReportBundle& bundle, std::uint64_t seed, const std::string& ledger);

}  // namespace thermoharvest
