#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "thermoharvest/calibration.hpp"
#include "thermoharvest/design.hpp"

namespace thermoharvest {

inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kSpeedOfLight = 2.99792458e8;             // m/s
inline constexpr double kPlanck = 6.62607015e-34;                 // J s
inline constexpr double kBoltzmann = 1.380649e-23;                // J/K

/// One resonant subgroup of cross-bowtie antennas.
struct AntennaGroup {
    double arm_length = 0.0;     // m
    double flare_angle = 0.0;    // deg, [20, 45]
    double gap = 0.0;            // m, [1e-9, 5e-8]
    double peak_absorptance = 0.0;
    double rel_bandwidth_ref = 0.0;

    void validate() const;
};

struct MetasurfaceDesign {
    std::vector<AntennaGroup> groups;
    double n_eff = 1.0;
    double metal_thickness = 0.0;  // m
    double pitch = 0.0;            // m

    void validate() const;
};

/// Three groups from the design's arm lengths, sharing its flare angle and gap.
MetasurfaceDesign metasurface_from_design(const DesignPoint& d, const OpticsCalibration& cal);

/// lambda_r = 2 n_eff L_arm.
double resonance_wavelength(double arm_length, double n_eff);

/// Unit-peak Lorentzian.
double lorentzian(double wavelength, double center, double fwhm) noexcept;

/// FWHM of a group's line: rel_bandwidth_ref * lambda_r * theta / theta_ref.
double group_fwhm(const AntennaGroup& g, double n_eff, const OpticsCalibration& cal);

struct AbsorptionSpectrum {
    std::vector<double> wavelengths;
    std::vector<double> absorptance;
    std::vector<double> reflectance;  // 1 - A; transmittance into the metal-backed stack is zero
};

/// A(lambda) = min(1, sum_g A_peak,g * Lor(lambda; lambda_r,g, FWHM_g)).
double absorptance_at(const MetasurfaceDesign& design, const OpticsCalibration& cal, double wavelength);

AbsorptionSpectrum absorptance_spectrum(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                                        std::span<const double> grid);

/// 512 log-spaced points over [0.8, 14] um.
std::vector<double> default_wavelength_grid(std::size_t points = 512);

struct ResonancePeak {
    double wavelength = 0.0;
    double absorptance = 0.0;
    double prominence = 0.0;
};

/// Strict local maxima whose topographic prominence exceeds `min_prominence`,
/// ordered by wavelength.
std::vector<ResonancePeak> find_resonance_peaks(const AbsorptionSpectrum& spectrum, double min_prominence = 0.05);

struct EnhancementResult {
    double max_enhancement = 1.0;  // |E/E0|^2
    double hotspot_wavelength = 0.0;
};

/// Gap- and flare-scaled Lorentzian enhancement, maximised over groups and
/// floored at 1.
EnhancementResult field_enhancement(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                                    double wavelength);

/// field_enhancement maximised over the resonance centres of all groups.
EnhancementResult peak_field_enhancement(const MetasurfaceDesign& design, const OpticsCalibration& cal);

/// eta0 that makes `design` reach `target` at `wavelength`.
double solve_enhancement_prefactor(const MetasurfaceDesign& design, OpticsCalibration cal, double target,
                                   double wavelength);

/// Q = 1/2 omega eps0 eps'' |E|^2 in W/m^3.
double volumetric_heating_density(double eps_imag, double angular_freq, double field_magnitude);

enum class IncidentKind { UniformBand, Blackbody };

struct IncidentSpectrum {
    IncidentKind kind = IncidentKind::UniformBand;
    double total_intensity = 0.0;  // W/m^2 inside the band
    double band_min = 2e-6;        // m
    double band_max = 12e-6;       // m
    double blackbody_temp = 306.15;

    void validate() const;
};

/// 30 mW/cm^2 spread uniformly over 2-12 um.
IncidentSpectrum default_incident();

/// Spectral irradiance shape (unnormalised) at one wavelength; zero outside the band.
double spectral_shape(const IncidentSpectrum& incident, double wavelength);

/// area * integral of A(lambda) I(lambda) over the band, trapezoidal on the
/// band edges plus every grid point strictly inside the band. I(lambda) is
/// normalised on the same nodes so that A = 1 returns exactly area * I0.
double integrate_absorbed(const std::function<double(double)>& absorptance, const IncidentSpectrum& incident,
                          std::span<const double> grid, double area);

/// P_abs = pitch^2 * integral A I dlambda. The grid must cover the band.
double absorbed_power(const MetasurfaceDesign& design, const OpticsCalibration& cal,
                      const IncidentSpectrum& incident, std::span<const double> grid);

void write_spectrum_csv(std::ostream& os, const AbsorptionSpectrum& spectrum);

}  // namespace thermoharvest
