#include "broadkin/params.hpp"

#include "broadkin/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace broadkin {

void validate(const PhysicalParams& p)
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw PreconditionError(std::string("invalid physical parameters: ") + what);
        }
    };
    require(std::isfinite(p.coriolis_F), "coriolis_F must be finite");
    require(p.buoyancy_N > 0.0, "buoyancy_N must be > 0");
    require(p.ref_vertical_wavenumber_m > 0.0, "ref_vertical_wavenumber_m must be > 0");
    require(p.density_rho0 > 0.0, "density_rho0 must be > 0");
    require(p.gravity_g > 0.0, "gravity_g must be > 0");
    require(p.viscosity_nu >= 0.0, "viscosity_nu must be >= 0");
    require(p.damping_exponent_gamma > 2.0, "damping_exponent_gamma must be > 2");
    require(p.broadening_c1 > 0.0, "broadening_c1 must be > 0");
    require(p.broadening_floor_c2 > 0.0, "broadening_floor_c2 must be > 0");
    require(p.kernel_constant_C >= 0.0, "kernel_constant_C must be >= 0");
    require(p.dimension_d == 2 || p.dimension_d == 3, "dimension_d must be 2 or 3");
}

DispersionParams derive_dispersion(const PhysicalParams& p)
{
    const double denom = p.ref_vertical_wavenumber_m * p.density_rho0 * p.buoyancy_N;
    return {p.coriolis_F * p.coriolis_F, (p.gravity_g * p.gravity_g) / (denom * denom)};
}

PhysicalParams params_for_dispersion(double lambda1, double lambda2)
{
    PhysicalParams p;
    p.coriolis_F = std::sqrt(lambda1);
    p.gravity_g = std::sqrt(lambda2);
    return p;
}

double omega(double k, const DispersionParams& disp)
{
    return std::sqrt(disp.lambda1 + disp.lambda2 * k * k);
}

double damping(double k, const PhysicalParams& p)
{
    if (k == 0.0) {
        return 0.0;
    }
    return 2.0 * p.viscosity_nu * std::pow(k, p.damping_exponent_gamma);
}

double sphere_area(int d)
{
    return d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

} // namespace broadkin
