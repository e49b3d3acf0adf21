#include "lutbench/rtm.hpp"

#include "lutbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lutbench {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kPlanckSecondRadiation = 1.438776877e7;  // hc/k in nm K
constexpr double kSunTemperature = 5800.0;

double gaussian(double nm, double center, double width) {
    const double u = (nm - center) / width;
    return std::exp(-u * u);
}

double unnormalized_solar(double nm) {
    const double x = kPlanckSecondRadiation / (nm * kSunTemperature);
    return 1.9 * std::pow(nm / 500.0, -5.0) / std::expm1(x);
}

double solar_normalization() {
    static const double factor = [] {
        double peak = 0.0;
        for (double nm : SpectralGrid::default_grid().wavelengths())
            peak = std::max(peak, unnormalized_solar(nm));
        return 1.8 / peak;
    }();
    return factor;
}

struct WaterBand {
    double center, width, strength;
};
constexpr WaterBand kWaterBands[] = {
    {940.0, 25.0, 0.30},
    {1130.0, 30.0, 0.45},
    {1380.0, 40.0, 1.60},
    {1870.0, 45.0, 2.20},
};

}  // namespace

SpectralGrid::SpectralGrid(std::vector<double> wavelengths) : nm_(std::move(wavelengths)) {
    if (nm_.empty()) throw InvalidConfig("spectral grid is empty");
    for (std::size_t i = 0; i < nm_.size(); ++i) {
        if (!(nm_[i] >= 400.0 && nm_[i] <= 2400.0))
            throw InvalidConfig("wavelength " + std::to_string(nm_[i]) + " outside [400, 2400] nm");
        if (i > 0 && !(nm_[i] > nm_[i - 1]))
            throw InvalidConfig("wavelengths must be strictly increasing");
    }
}

SpectralGrid SpectralGrid::uniform(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw InvalidConfig("bad uniform grid spec");
    std::vector<double> nm;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    nm.reserve(count);
    for (std::size_t i = 0; i < count; ++i) nm.push_back(start + static_cast<double>(i) * step);
    return SpectralGrid(std::move(nm));
}

SpectralGrid SpectralGrid::default_grid() { return uniform(400.0, 2400.0, 5.0); }

void Geometry::validate() const {
    if (!(sza >= 0.0 && sza < 90.0)) throw InvalidConfig("sza must be in [0, 90)");
    if (!(vza >= 0.0 && vza < 90.0)) throw InvalidConfig("vza must be in [0, 90)");
    if (!std::isfinite(raa)) throw InvalidConfig("raa must be finite");
}

double Geometry::mu_s() const { return std::cos(sza * kDegToRad); }
double Geometry::mu_v() const { return std::cos(vza * kDegToRad); }
double Geometry::cos_scattering() const {
    return -mu_s() * mu_v() -
           std::sin(sza * kDegToRad) * std::sin(vza * kDegToRad) * std::cos(raa * kDegToRad);
}

double solar_irradiance(double nm) { return unnormalized_solar(nm) * solar_normalization(); }

double rayleigh_optical_depth(double nm) {
    const double um = nm * 1e-3;
    const double um2 = um * um;
    const double um4 = um2 * um2;
    return 0.008569 / um4 * (1.0 + 0.0113 / um2 + 0.00013 / um4);
}

double ozone_optical_depth(double nm, double o3c) { return o3c * 3.0 * gaussian(nm, 600.0, 70.0); }

double water_optical_depth(double nm, double cwv) {
    double s = 0.0;
    for (const auto& b : kWaterBands) s += b.strength * gaussian(nm, b.center, b.width);
    return cwv * s;
}

double aerosol_optical_depth(double nm, double aot, double alpha) {
    return aot * std::pow(nm / 550.0, -alpha);
}

double vegetation_reflectance(double nm) {
    const double red_edge = 1.0 / (1.0 + std::exp(-(nm - 715.0) / 30.0));
    const double rho = 0.05 + 0.43 * red_edge + 0.04 * gaussian(nm, 550.0, 30.0) -
                       0.03 * gaussian(nm, 670.0, 25.0) - 0.12 * gaussian(nm, 1450.0, 60.0) -
                       0.10 * gaussian(nm, 1940.0, 70.0);
    return std::clamp(rho, 0.01, 0.55);
}

std::vector<double> surface_reflectance(const SpectralGrid& grid) {
    std::vector<double> rho(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) rho[k] = vegetation_reflectance(grid[k]);
    return rho;
}

bool within_bounds(std::span<const double> x, const std::vector<VariableSpec>& specs) {
    if (x.size() != specs.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < specs[i].min || x[i] > specs[i].max) return false;
    return true;
}

AtmFunctions atm_functions(std::span<const double> x, const SpectralGrid& grid,
                           const Geometry& geom) {
    if (x.size() != kNumAtmVars)
        throw NonFiniteInput("expected 6 input variables, got " + std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw NonFiniteInput("input vector has non-finite entries");

    const double o3c = x[kO3C];
    const double cwv = x[kCWV];
    const double aot = x[kAOT];
    const double g = x[kG];
    const double alpha = x[kAlpha];
    const double ssa = x[kSSA];

    const double mu_s = geom.mu_s();
    const double mu_v = geom.mu_v();
    const double cos_t = geom.cos_scattering();
    const double p_rayleigh = 0.75 * (1.0 + cos_t * cos_t);
    const double p_hg = (1.0 - g * g) / std::pow(1.0 + g * g - 2.0 * g * cos_t, 1.5);

    const std::size_t k_count = grid.size();
    AtmFunctions atm;
    atm.l0.resize(k_count);
    atm.edir.resize(k_count);
    atm.edif.resize(k_count);
    atm.tdir.resize(k_count);
    atm.tdif.resize(k_count);
    atm.s.resize(k_count);

    for (std::size_t k = 0; k < k_count; ++k) {
        const double nm = grid[k];
        const double e0 = solar_irradiance(nm);
        const double tau_r = rayleigh_optical_depth(nm);
        const double tau_a = aerosol_optical_depth(nm, aot, alpha);
        const double tau_gas = ozone_optical_depth(nm, o3c) + water_optical_depth(nm, cwv);
        const double tau = tau_r + tau_a + tau_gas;
        const double tau_abs = tau_gas + (1.0 - ssa) * tau_a;
        const double tau_sc = tau_r + ssa * tau_a;

        atm.tdir[k] = std::exp(-tau / mu_v);
        atm.edir[k] = e0 * std::exp(-tau / mu_s);
        atm.tdif[k] = std::exp(-tau / mu_v) * std::expm1(0.5 * tau_sc / mu_v);
        atm.edif[k] = e0 * mu_s * std::exp(-tau_abs / mu_s) * (-std::expm1(-tau_sc / mu_s)) * 0.5;
        atm.l0[k] = e0 * mu_s / (4.0 * kPi * (mu_s + mu_v)) *
                    (tau_r * p_rayleigh + ssa * tau_a * p_hg) *
                    std::exp(-tau_abs * (1.0 / mu_s + 1.0 / mu_v));
        atm.s[k] = std::min(-std::expm1(-0.5 * tau_sc), 0.9);
    }
    return atm;
}

Spectrum couple_lambertian(const AtmFunctions& atm, std::span<const double> rho, double mu_s) {
    const std::size_t k_count = atm.l0.size();
    if (rho.size() != k_count) throw DimensionMismatch("reflectance length differs from grid");
    Spectrum out(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        out[k] = atm.l0[k] + (atm.edir[k] * mu_s + atm.edif[k]) * (atm.tdif[k] + atm.tdir[k]) *
                                 rho[k] / (kPi * (1.0 - atm.s[k] * rho[k]));
    }
    return out;
}

Spectrum toa_radiance(std::span<const double> x, const SpectralGrid& grid, const Geometry& geom) {
    const auto atm = atm_functions(x, grid, geom);
    const auto rho = surface_reflectance(grid);
    return couple_lambertian(atm, rho, geom.mu_s());
}

}  // namespace lutbench
