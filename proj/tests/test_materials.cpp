#include <doctest.h>

#include <cmath>
#include <sstream>

#include "thermoharvest/error.hpp"
#include "thermoharvest/materials.hpp"

using namespace thermoharvest;

namespace {

PermittivityTable two_point() {
    return PermittivityTable("t", {{1e-6, -10.0, 2.0}, {2e-6, -30.0, 6.0}});
}

}  // namespace

TEST_CASE("permittivity interpolation identities") {
    const auto t = two_point();
    const auto at_entry = t.at(1e-6);
    CHECK(at_entry.real == -10.0);
    CHECK(at_entry.imag == 2.0);
    const auto mid = t.at(1.5e-6);
    CHECK(mid.real == doctest::Approx(-20.0).epsilon(1e-14));
    CHECK(mid.imag == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("permittivity outside the table is a range error naming the interval") {
    const auto t = two_point();
    try {
        (void)t.at(3e-6);
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1e-06") != std::string::npos);
        CHECK(msg.find("2e-06") != std::string::npos);
    }
}

TEST_CASE("permittivity table invariants") {
    CHECK_THROWS_AS(PermittivityTable("x", {{1e-6, 1.0, 0.0}}), ArgumentError);
    CHECK_THROWS_AS(PermittivityTable("x", {{2e-6, 1.0, 0.0}, {1e-6, 1.0, 0.0}}), ArgumentError);
    CHECK_THROWS_AS(PermittivityTable("x", {{1e-6, 1.0, -0.1}, {2e-6, 1.0, 0.0}}), ArgumentError);
}

TEST_CASE("permittivity CSV parsing") {
    std::istringstream in("# comment\nwavelength_m,eps_real,eps_imag\n1e-6,-10,2\n2e-6,-30,6\n");
    const auto t = PermittivityTable::from_csv("csv", in);
    CHECK(t.entries().size() == 2);
    CHECK(t.at(2e-6).imag == 6.0);
}

TEST_CASE("interpolated permittivity is continuous") {
    const auto& al = aluminum_permittivity();
    const auto& e = al.entries();
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        const double lo = e[i].wavelength;
        const double hi = e[i + 1].wavelength;
        const double bound_r = std::abs(e[i + 1].eps_real - e[i].eps_real);
        const double bound_i = std::abs(e[i + 1].eps_imag - e[i].eps_imag);
        const auto a = al.at(lo + 0.25 * (hi - lo));
        const auto b = al.at(lo + 0.75 * (hi - lo));
        CHECK(std::abs(a.real - b.real) <= bound_r * (1 + 1e-12));
        CHECK(std::abs(a.imag - b.imag) <= bound_i * (1 + 1e-12));
    }
}

TEST_CASE("shipped aluminium table is metallic and covers the optical grid") {
    const auto& al = aluminum_permittivity();
    CHECK(al.min_wavelength() <= 0.8e-6);
    CHECK(al.max_wavelength() >= 14e-6);
    const auto p = al.at(4.2e-6);
    CHECK(p.imag > 0.0);
    CHECK(p.real < 0.0);
    for (const auto& e : al.entries()) {
        CHECK(e.eps_imag >= 0.0);
    }
    // Ordal free-electron fit for Al: eps' ~ -2.3e3 at 4.2 um, ~ -1.1e4 at 10.6 um.
    CHECK(al.at(4.2e-6).real < -1000.0);
    CHECK(al.at(4.2e-6).real > -2500.0);
    CHECK(al.at(10.6e-6).real < -5000.0);
}

TEST_CASE("Drude closed form") {
    const DrudeParams p{1.0, 2.0e16, 1.0e14};
    const double w = 3.0e15;
    const auto e = drude_permittivity(p, w);
    const double wp2 = p.plasma_freq * p.plasma_freq;
    const double den = w * w + p.damping * p.damping;
    CHECK(e.real == doctest::Approx(1.0 - wp2 / den).epsilon(1e-14));
    CHECK(e.imag == doctest::Approx(wp2 * p.damping / (w * den)).epsilon(1e-14));
}

TEST_CASE("Drude lossless limit and plasma zero crossing") {
    const DrudeParams lossless{1.0, 1.0e16, 1e-6};
    const auto e = drude_permittivity(lossless, 5e15);
    CHECK(e.imag < 1e-15);
    CHECK(e.real < 0.0);
    const DrudeParams weak{1.0, 1.0e16, 1.0e12};
    CHECK(std::abs(drude_permittivity(weak, 1.0e16).real) < 1e-7);
}

TEST_CASE("Drude aluminium is lossier at 10.6 um than at 4.2 um") {
    const auto p = aluminum_drude();
    constexpr double c = 299792458.0;
    const double w_long = 2 * M_PI * c / 10.6e-6;
    const double w_short = 2 * M_PI * c / 4.2e-6;
    CHECK(drude_permittivity(p, w_long).imag > drude_permittivity(p, w_short).imag);
    CHECK_THROWS_AS((void)drude_permittivity(p, 0.0), DomainError);
    CHECK_THROWS_AS((void)drude_permittivity(p, -1.0), DomainError);
}

TEST_CASE("thermoelectric registry") {
    const auto te = te_properties("bi2te3_thin_film");
    CHECK(te.seebeck == 210e-6);
    CHECK(te.thermal_conductivity >= 1.2);
    CHECK(te.thermal_conductivity <= 1.5);
    CHECK(te.thermal_conductivity == 1.35);
    CHECK(te.electrical_conductivity == 1.0e5);
    try {
        (void)te_properties("pedot");
        FAIL("expected LookupError");
    } catch (const LookupError& e) {
        CHECK(std::string(e.what()).find("bi2te3_thin_film") != std::string::npos);
    }
}

TEST_CASE("thermal layer registry") {
    for (const auto& id : {"pdms", "aluminum", "sio2", "al2o3", "te_film", "polyimide"}) {
        const auto p = layer_thermal_properties(id);
        CHECK(p.density > 0.0);
        CHECK(p.specific_heat > 0.0);
        CHECK(p.conductivity > 0.0);
    }
    CHECK(known_layer_ids().size() == 6);
    CHECK(layer_thermal_properties("te_film").conductivity == te_properties("bi2te3_thin_film").thermal_conductivity);
    CHECK(layer_thermal_properties("pdms").conductivity < layer_thermal_properties("aluminum").conductivity);
    CHECK_THROWS_AS((void)layer_thermal_properties("graphene"), LookupError);
}
