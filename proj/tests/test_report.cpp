#include <doctest.h>

#include <algorithm>

#include "test_support.hpp"
#include "thermoharvest/error.hpp"
#include "thermoharvest/report.hpp"
#include "thermoharvest/util.hpp"

using namespace thermoharvest;

namespace {

std::vector<PlotSeries> series() {
    return {{"a", {1, 2, 3, 4}, {0.5, 0.25, 1.0, 2.0}}, {"b <&>", {1, 4}, {1.5, 1.5}}};
}

}  // namespace

TEST_CASE("SVG output is deterministic and carries provenance") {
    const PlotSpec spec{"title", "x", "y", false, false};
    const auto prov = provenance_comment(3, "L");
    const auto a = svg_line_plot(spec, series(), prov);
    CHECK(a == svg_line_plot(spec, series(), prov));
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("<!-- " + prov + " -->") != std::string::npos);
    CHECK(a.find("b &lt;&amp;&gt;") != std::string::npos);
    CHECK(a.find("<polyline") != std::string::npos);
    const auto s = svg_scatter_plot(spec, series(), prov);
    CHECK(s.find("<circle") != std::string::npos);
    CHECK(s != a);

    PlotSpec logs = spec;
    logs.log_x = true;
    logs.log_y = true;
    CHECK(svg_line_plot(logs, series(), prov) != a);
}

TEST_CASE("report bundle manifest verifies and detects tampering") {
    th_test::TempDir dir("report");
    CHECK_THROWS_AS((void)build_report(dir.path(), 1, "L"), IoError);

    const auto prov = provenance_comment(1, "L");
    write_text_file(dir.path() / "spectrum.csv", prov + "\nwavelength_m,absorptance,reflectance\n1e-6,0.5,0.5\n");
    write_text_file(dir.path() / "spectrum.svg", svg_line_plot({"s", "x", "y"}, series(), prov));
    write_text_file(dir.path() / "sweep_gap_m.csv", prov + "\ngap_m,max_enh\n1e-9,3\n");
    const auto bundle = build_report(dir.path(), 1, "L");
    CHECK(bundle.files.size() == 4);  // the three outputs plus report.md
    CHECK(std::filesystem::exists(dir.path() / "manifest.json"));
    CHECK(read_text_file(dir.path() / "report.md").find(prov) != std::string::npos);
    for (const auto& f : bundle.files) {
        CHECK(f.sha256 == sha256_hex(read_text_file(dir.path() / f.path)));
    }
    const auto manifest = manifest_json(bundle, 1, "L");
    CHECK(manifest.find("sweep_gap_m.csv") != std::string::npos);
    CHECK(manifest.find("\"ledger_version\"") != std::string::npos);

    verify_report(bundle);
    write_text_file(dir.path() / "spectrum.csv", prov + "\nwavelength_m,absorptance,reflectance\n1e-6,0.6,0.4\n");
    try {
        verify_report(bundle);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("spectrum.csv") != std::string::npos);
    }
}

TEST_CASE("known outputs list") {
    const auto& known = known_output_files();
    CHECK(std::find(known.begin(), known.end(), "front.csv") != known.end());
    CHECK(std::find(known.begin(), known.end(), "validate.csv") != known.end());
}
