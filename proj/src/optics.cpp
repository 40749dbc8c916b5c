#include "thermoharvest/optics.hpp"

#include <algorithm>
#include <cmath>

#include "thermoharvest/error.hpp"
#include "thermoharvest/util.hpp"

namespace thermoharvest {

namespace {

constexpr double kGridMin = 0.8e-6;
constexpr double kGridMax = 14e-6;

double planck_shape(double wavelength, double temp) {
    const double x = kPlanck * kSpeedOfLight / (wavelength * kBoltzmann * temp);
    return 1.0 / (std::pow(wavelength, 5) * std::expm1(x));
}

double group_peak_enhancement(const AntennaGroup& g, const OpticsCalibration& cal) {
    return cal.eta0 * std::exp((cal.gap_ref - g.gap) / cal.gap_decay) *
           std::pow(cal.theta_ref_deg / g.flare_angle, cal.flare_exponent);
}

}  // namespace

void AntennaGroup::validate() const {
    if (!(arm_length > 0.0)) {
        throw DomainError("antenna arm length must be positive");
    }
    if (!(flare_angle >= 20.0 && flare_angle <= 45.0)) {
        throw DomainError("flare angle " + format_double(flare_angle) + " deg outside [20, 45]");
    }
    if (!(gap >= 1e-9 && gap <= 5e-8)) {
        throw DomainError("feed gap " + format_double(gap) + " m outside [1e-9, 5e-8]");
    }
    if (!(peak_absorptance > 0.0 && peak_absorptance <= 1.0)) {
        throw DomainError("peak absorptance must lie in (0, 1]");
    }
    if (!(rel_bandwidth_ref > 0.0)) {
        throw DomainError("relative bandwidth must be positive");
    }
}

void MetasurfaceDesign::validate() const {
    if (groups.empty()) {
        throw DomainError("metasurface needs at least one antenna group");
    }
    if (!(n_eff >= 1.0)) {
        throw DomainError("n_eff must be >= 1");
    }
    double longest = 0.0;
    for (const auto& g : groups) {
        g.validate();
        longest = std::max(longest, g.arm_length);
    }
    if (!(pitch > 2.0 * longest)) {
        throw DomainError("pitch " + format_double(pitch) + " m must exceed twice the longest arm (" +
                          format_double(2.0 * longest) + " m)");
    }
}

MetasurfaceDesign metasurface_from_design(const DesignPoint& d, const OpticsCalibration& cal) {
    MetasurfaceDesign m;
    for (double arm : {d.arm_length_1, d.arm_length_2, d.arm_length_3}) {
        m.groups.push_back({arm, d.flare_angle, d.gap, cal.peak_absorptance, cal.rel_bandwidth_ref});
    }
    m.n_eff = cal.n_eff;
    m.metal_thickness = d.metal_thickness;
    m.pitch = cal.pitch;
    return m;
}

double resonance_wavelength(double arm_length, double n_eff) {
    if (!(arm_length > 0.0) || !(n_eff > 0.0)) {
        throw DomainError("resonance wavelength needs positive arm length and n_eff");
    }
    return 2.0 * n_eff * arm_length;
}

double lorentzian(double wavelength, double center, double fwhm) noexcept {
    const double u = (wavelength - center) / (0.5 * fwhm);
    return 1.0 / (1.0 + u * u);
}

double group_fwhm(const AntennaGroup& g, double n_eff, const OpticsCalibration& cal) {
    return g.rel_bandwidth_ref * resonance_wavelength(g.arm_length, n_eff) * (g.flare_angle / cal.theta_ref_deg);
}

double absorptance_at(const MetasurfaceDesign& design, const OpticsCalibration& cal, double wavelength) {
    double sum = 0.0;
    for (const auto& g : design.groups) {
        const double center = resonance_wavelength(g.arm_length, design.n_eff);
        sum += g.peak_absorptance * lorentzian(wavelength, center, group_fwhm(g, design.n_eff, cal));
    }
    return std::min(1.0, sum);
}

AbsorptionSpectrum absorptance_spectrum(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                                        std::span<const double> grid) {
    if (grid.empty()) {
        throw ArgumentError("absorptance spectrum needs a non-empty wavelength grid");
    }
    design.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw ArgumentError("wavelength grid must be strictly ascending");
        }
    }
    if (grid.front() < kGridMin * (1 - 1e-12) || grid.back() > kGridMax * (1 + 1e-12)) {
        throw RangeError("wavelength grid must lie within [0.8, 14] um");
    }
    AbsorptionSpectrum s;
    s.wavelengths.assign(grid.begin(), grid.end());
    s.absorptance.reserve(grid.size());
    s.reflectance.reserve(grid.size());
    for (double w : grid) {
        const double a = absorptance_at(design, cal, w);
        s.absorptance.push_back(a);
        s.reflectance.push_back(1.0 - a);
    }
    return s;
}

std::vector<double> default_wavelength_grid(std::size_t points) {
    if (points < 2) {
        throw ArgumentError("wavelength grid needs at least two points");
    }
    std::vector<double> grid(points);
    const double ratio = std::log(kGridMax / kGridMin);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = kGridMin * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    grid.front() = kGridMin;
    grid.back() = kGridMax;
    return grid;
}

std::vector<ResonancePeak> find_resonance_peaks(const AbsorptionSpectrum& spectrum, double min_prominence) {
    const auto& a = spectrum.absorptance;
    std::vector<ResonancePeak> peaks;
    const std::size_t n = a.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(a[i] > a[i - 1] && a[i] > a[i + 1])) {
            continue;
        }
        // Prominence: height above the higher of the two lowest points reached
        // before climbing to something taller (or hitting the edge).
        double left_min = a[i];
        for (std::size_t j = i; j-- > 0;) {
            if (a[j] > a[i]) {
                break;
            }
            left_min = std::min(left_min, a[j]);
        }
        double right_min = a[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (a[j] > a[i]) {
                break;
            }
            right_min = std::min(right_min, a[j]);
        }
        const double prominence = a[i] - std::max(left_min, right_min);
        if (prominence > min_prominence) {
            peaks.push_back({spectrum.wavelengths[i], a[i], prominence});
        }
    }
    return peaks;
}

EnhancementResult field_enhancement(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                                    double wavelength) {
    if (!(wavelength >= kGridMin * (1 - 1e-12) && wavelength <= kGridMax * (1 + 1e-12))) {
        throw RangeError("wavelength " + format_double(wavelength) + " m outside [0.8, 14] um");
    }
    design.validate();
    double best = 0.0;
    for (const auto& g : design.groups) {
        const double center = resonance_wavelength(g.arm_length, design.n_eff);
        const double eta =
            group_peak_enhancement(g, cal) * lorentzian(wavelength, center, group_fwhm(g, design.n_eff, cal));
        best = std::max(best, eta);
    }
    return {std::max(1.0, best), wavelength};
}

EnhancementResult peak_field_enhancement(const MetasurfaceDesign& design, const OpticsCalibration& cal) {
    EnhancementResult best{1.0, resonance_wavelength(design.groups.front().arm_length, design.n_eff)};
    bool first = true;
    for (const auto& g : design.groups) {
        const double center = resonance_wavelength(g.arm_length, design.n_eff);
        const auto r = field_enhancement(design, cal, std::clamp(center, kGridMin, kGridMax));
        if (first || r.max_enhancement > best.max_enhancement) {
            best = r;
            first = false;
        }
    }
    return best;
}

double solve_enhancement_prefactor(const MetasurfaceDesign& design, OpticsCalibration cal, double target,
                                   double wavelength) {
    if (!(target > 1.0)) {
        throw DomainError("enhancement anchor must exceed the floor of 1");
    }
    // eta is linear in eta0 above the floor: evaluate the shape at eta0 = 1.
    cal.eta0 = 1.0;
    design.validate();
    double shape = 0.0;
    for (const auto& g : design.groups) {
        const double center = resonance_wavelength(g.arm_length, design.n_eff);
        shape = std::max(shape, group_peak_enhancement(g, cal) *
                                    lorentzian(wavelength, center, group_fwhm(g, design.n_eff, cal)));
    }
    if (!(shape > 0.0)) {
        throw DomainError("enhancement shape vanishes at the anchor wavelength");
    }
    return target / shape;
}

double volumetric_heating_density(double eps_imag, double angular_freq, double field_magnitude) {
    if (eps_imag < 0.0 || angular_freq < 0.0 || field_magnitude < 0.0) {
        throw DomainError("heating density inputs must be non-negative");
    }
    return 0.5 * angular_freq * kVacuumPermittivity * eps_imag * field_magnitude * field_magnitude;
}

void IncidentSpectrum::validate() const {
    if (!(total_intensity >= 0.0) || !std::isfinite(total_intensity)) {
        throw DomainError("incident intensity must be non-negative");
    }
    if (!(band_min > 0.0) || !(band_min < band_max)) {
        throw DomainError("incident band needs 0 < lambda_min < lambda_max");
    }
    if (kind == IncidentKind::Blackbody && !(blackbody_temp > 0.0)) {
        throw DomainError("blackbody temperature must be positive");
    }
}

IncidentSpectrum default_incident() {
    return {IncidentKind::UniformBand, 300.0, 2e-6, 12e-6, 306.15};
}

double spectral_shape(const IncidentSpectrum& incident, double wavelength) {
    if (wavelength < incident.band_min || wavelength > incident.band_max) {
        return 0.0;
    }
    if (incident.kind == IncidentKind::UniformBand) {
        return 1.0;
    }
    return planck_shape(wavelength, incident.blackbody_temp);
}

double integrate_absorbed(const std::function<double(double)>& absorptance, const IncidentSpectrum& incident,
                          std::span<const double> grid, double area) {
    incident.validate();
    if (grid.empty() || grid.front() > incident.band_min * (1 + 1e-12) ||
        grid.back() < incident.band_max * (1 - 1e-12)) {
        throw RangeError("wavelength grid does not cover the incident band [" + format_double(incident.band_min) +
                         ", " + format_double(incident.band_max) + "] m");
    }
    std::vector<double> nodes{incident.band_min};
    for (double w : grid) {
        if (w > incident.band_min && w < incident.band_max) {
            nodes.push_back(w);
        }
    }
    nodes.push_back(incident.band_max);

    double weighted = 0.0;
    double norm = 0.0;
    double prev_shape = spectral_shape(incident, nodes[0]);
    double prev_val = absorptance(nodes[0]) * prev_shape;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double h = nodes[i] - nodes[i - 1];
        const double shape = spectral_shape(incident, nodes[i]);
        const double val = absorptance(nodes[i]) * shape;
        weighted += 0.5 * h * (prev_val + val);
        norm += 0.5 * h * (prev_shape + shape);
        prev_val = val;
        prev_shape = shape;
    }
    if (incident.total_intensity == 0.0) {
        return 0.0;
    }
    return area * incident.total_intensity * weighted / norm;
}

double absorbed_power(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                      const IncidentSpectrum& incident, std::span<const double> grid) {
    design.validate();
    return integrate_absorbed([&](double w) { return absorptance_at(design, cal, w); }, incident, grid,
                              design.pitch * design.pitch);
}

void write_spectrum_csv(std::ostream& os, const AbsorptionSpectrum& spectrum) {
    os << "wavelength_m,absorptance,reflectance\n";
    for (std::size_t i = 0; i < spectrum.wavelengths.size(); ++i) {
        os << format_double(spectrum.wavelengths[i]) << ',' << format_double(spectrum.absorptance[i]) << ','
           << format_double(spectrum.reflectance[i]) << '\n';
    }
}

}  // namespace thermoharvest
