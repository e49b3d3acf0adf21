#pragma once

// Analytic surrogate of a top-of-atmosphere radiance simulator.
//
// Inputs follow atmospheric_variables(): O3C, CWV, AOT, G, ALPHA, SSA. The
// atmosphere is a closed-form single-scattering sketch (Rayleigh + aerosol +
// Gaussian gas bands); it only needs to be smooth and sensitive to all six
// variables, not physically faithful.

#include "lutbench/numerics.hpp"
#include "lutbench/sampling.hpp"

#include <span>
#include <vector>

namespace lutbench {

/// Strictly increasing wavelengths in nm, inside [400, 2400].
class SpectralGrid {
public:
    SpectralGrid() = default;
    explicit SpectralGrid(std::vector<double> wavelengths);

    /// 400..2400 nm at 5 nm (K = 401).
    static SpectralGrid default_grid();
    static SpectralGrid uniform(double start, double stop, double step);

    std::size_t size() const noexcept { return nm_.size(); }
    const std::vector<double>& wavelengths() const noexcept { return nm_; }
    double operator[](std::size_t i) const noexcept { return nm_[i]; }

    friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

private:
    std::vector<double> nm_;
};

/// Viewing geometry in degrees. Held fixed for a whole LUT.
struct Geometry {
    double sza = 55.0;
    double vza = 0.0;
    double raa = 0.0;

    void validate() const;
    double mu_s() const;
    double mu_v() const;
    /// Cosine of the scattering angle: -mu_s mu_v - sin(sza) sin(vza) cos(raa).
    double cos_scattering() const;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Per-wavelength atmospheric transfer functions of the Lambertian coupling.
struct AtmFunctions {
    std::vector<double> l0;    ///< path radiance, W m-2 sr-1 nm-1
    std::vector<double> edir;  ///< direct irradiance on a surface normal to the beam, W m-2 nm-1
    std::vector<double> edif;  ///< diffuse at-surface irradiance, W m-2 nm-1
    std::vector<double> tdir;  ///< surface-to-sensor direct transmittance
    std::vector<double> tdif;  ///< surface-to-sensor diffuse transmittance
    std::vector<double> s;     ///< spherical albedo
};

using Spectrum = std::vector<double>;

/// Index of each input variable in the six-vector.
enum AtmVar : std::size_t { kO3C = 0, kCWV, kAOT, kG, kAlpha, kSSA, kNumAtmVars };

/// Top-of-atmosphere solar irradiance shape normalized to 1.8 W m-2 nm-1 at its
/// maximum over the default grid.
double solar_irradiance(double nm);

double rayleigh_optical_depth(double nm);
double ozone_optical_depth(double nm, double o3c);
double water_optical_depth(double nm, double cwv);
double aerosol_optical_depth(double nm, double aot, double alpha);

/// Fixed vegetation reflectance curve, clamped to [0.01, 0.55].
double vegetation_reflectance(double nm);
std::vector<double> surface_reflectance(const SpectralGrid& grid);

/// Throws NonFiniteInput for NaN/inf entries or a wrong-length vector.
AtmFunctions atm_functions(std::span<const double> x, const SpectralGrid& grid,
                           const Geometry& geom);

/// True when `x` lies inside the bounds of `specs` (out-of-bounds inputs are
/// evaluated but callers may want to flag them).
bool within_bounds(std::span<const double> x, const std::vector<VariableSpec>& specs);

/// L = L0 + (Edir mu_s + Edif)(Tdif + Tdir) rho / (pi (1 - S rho)), per band.
Spectrum couple_lambertian(const AtmFunctions& atm, std::span<const double> rho, double mu_s);

Spectrum toa_radiance(std::span<const double> x, const SpectralGrid& grid, const Geometry& geom);

}  // namespace lutbench
