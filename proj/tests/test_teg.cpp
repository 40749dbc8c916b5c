#include <doctest.h>

#include <cmath>

#include "thermoharvest/error.hpp"
#include "thermoharvest/pipeline.hpp"
#include "thermoharvest/teg.hpp"

using namespace thermoharvest;

namespace {

const TeMaterial kTe = te_properties("bi2te3_thin_film");

TeLegGeometry default_leg() {
    const auto d = default_design();
    return {d.te_height, d.te_width, 2};
}

ThermalNetwork device_net() {
    const auto& cal = default_calibration();
    const auto d = default_design();
    const Environment env;
    const auto inc = default_incident();
    const auto meta = metasurface_from_design(d, cal.optics);
    const double p_abs = absorbed_power(meta, cal.optics, inc, default_wavelength_grid());
    return build_network(d, env, hotspot_power(p_abs, d.spacer_thickness, cal.coupling), cal);
}

}  // namespace

TEST_CASE("open-circuit voltage of the reference junction") {
    CHECK(open_circuit_voltage(210e-6, 12.9) == doctest::Approx(2.709e-3).epsilon(1e-12));
    CHECK(open_circuit_voltage(210e-6, -12.9) == doctest::Approx(-2.709e-3).epsilon(1e-12));
    CHECK(open_circuit_voltage(210e-6, 0.0) == 0.0);
}

TEST_CASE("internal resistance of the reference leg pair") {
    CHECK(internal_resistance(default_leg(), 1e5) == doctest::Approx(12.0).epsilon(1e-12));
    auto taller = default_leg();
    taller.height *= 2;
    CHECK(internal_resistance(taller, 1e5) == doctest::Approx(24.0).epsilon(1e-12));
    auto wider = default_leg();
    wider.width *= 2;
    CHECK(internal_resistance(wider, 1e5) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(width_for_resistance(default_leg().height, 1e5, 2, 12.0) == doctest::Approx(default_leg().width));
    TeLegGeometry bad{0.0, 1e-6, 2};
    CHECK_THROWS((void)internal_resistance(bad, 1e5));
}

TEST_CASE("load power") {
    const double v = 2.709e-3;
    CHECK(matched_power(v, 12.0) == doctest::Approx(1.528e-7).epsilon(1e-3));
    CHECK(load_power(v, 12.0, 12.0) == doctest::Approx(v * v / 48.0).epsilon(1e-14));
    CHECK(load_power(v, 12.0, kOpenCircuit) == 0.0);
    CHECK(load_power(v, 12.0, 24.0) < load_power(v, 12.0, 12.0));
    CHECK(load_power(v, 12.0, 6.0) < load_power(v, 12.0, 12.0));
    CHECK(load_power(v, 12.0, 24.0) == doctest::Approx(v * v * 24.0 / (36.0 * 36.0)).epsilon(1e-14));
}

TEST_CASE("power density of the reference array") {
    const double p = matched_power(2.709e-3, 12.0);
    const double d = power_density(p, 1e7);
    CHECK(d == doctest::Approx(1.528).epsilon(2e-3));
    CHECK(d * 0.1 == doctest::Approx(0.153).epsilon(0.005));  // mW/cm^2
}

TEST_CASE("coupled point at open circuit needs one pass") {
    const auto net = device_net();
    const auto p = coupled_operating_point(net, kTe, default_leg(), kOpenCircuit);
    CHECK(p.iterations == 1);
    CHECK(p.output.current == 0.0);
    CHECK(p.output.power == 0.0);
    CHECK(p.delta_T == doctest::Approx(solve_steady(net).delta_T).epsilon(1e-14));
}

TEST_CASE("Peltier back-action lowers the matched-load temperature difference") {
    const auto net = device_net();
    const auto open = coupled_operating_point(net, kTe, default_leg(), kOpenCircuit);
    const auto matched = coupled_operating_point(net, kTe, default_leg(), 12.0);
    CHECK(matched.iterations >= 2);
    CHECK(matched.delta_T < open.delta_T);
    // ZT ~ 1 for the reference leg, so the Peltier sink is a sizeable share of the leg heat flow.
    CHECK(matched.delta_T > 0.5 * open.delta_T);
    CHECK(matched.output.current == doctest::Approx(kTe.seebeck * matched.delta_T / 24.0).epsilon(1e-6));
    const auto json = operating_point_json(matched);
    CHECK(json.find("\"delta_T_K\"") != std::string::npos);
}

TEST_CASE("coupled point is tolerance invariant") {
    const auto net = device_net();
    CoupledOptions loose;
    loose.tol = 1e-6;
    CoupledOptions tight;
    tight.tol = 1e-12;
    const auto a = coupled_operating_point(net, kTe, default_leg(), 12.0, loose);
    const auto b = coupled_operating_point(net, kTe, default_leg(), 12.0, tight);
    CHECK(std::abs(a.delta_T - b.delta_T) < 1e-5);
    CHECK(b.iterations >= a.iterations);
}

TEST_CASE("vanishing Seebeck coefficient decouples") {
    const auto net = device_net();
    auto te = kTe;
    te.seebeck = 1e-300;
    const auto p = coupled_operating_point(net, te, default_leg(), 12.0);
    CHECK(p.delta_T == doctest::Approx(solve_steady(net).delta_T).epsilon(1e-12));
    CHECK(p.iterations <= 2);
}

TEST_CASE("coupled solve argument checks") {
    const auto net = device_net();
    CHECK_THROWS_AS((void)coupled_operating_point(net, kTe, default_leg(), 0.0), DomainError);
    CoupledOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS((void)coupled_operating_point(net, kTe, default_leg(), 12.0, bad), ArgumentError);
    CoupledOptions one;
    one.max_iterations = 1;
    CHECK_THROWS_AS((void)coupled_operating_point(net, kTe, default_leg(), 12.0, one), ConvergenceError);
}
