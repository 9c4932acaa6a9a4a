#pragma once

namespace broadkin {

/// Physical constants of the stratified-ocean three-wave model (SI units).
struct PhysicalParams {
    double coriolis_F = 0.0;
    double buoyancy_N = 1.0;
    double ref_vertical_wavenumber_m = 1.0;
    double gravity_g = 1.0;
    double density_rho0 = 1.0;
    double viscosity_nu = 0.1;
    double damping_exponent_gamma = 3.0;
    double broadening_c1 = 1.0;
    double broadening_floor_c2 = 1.0;
    double kernel_constant_C = 1.0;
    int dimension_d = 3;
};

/// Constants of the dispersion law omega(k) = sqrt(lambda1 + lambda2 k^2).
struct DispersionParams {
    double lambda1 = 0.0;
    double lambda2 = 1.0;
};

/// Throws PreconditionError naming the first violated invariant.
void validate(const PhysicalParams& params);

DispersionParams derive_dispersion(const PhysicalParams& params);

/// Convenience for tests and tools that want to pick (Lambda1, Lambda2)
/// directly: F = sqrt(lambda1) and g chosen so that Lambda2 comes out as
/// requested with unit m, rho0, N.
PhysicalParams params_for_dispersion(double lambda1, double lambda2);

double omega(double k, const DispersionParams& disp);

/// Viscous damping rate 2 nu k^gamma.
double damping(double k, const PhysicalParams& params);

/// Unit-sphere surface area S_{d-1}: 2 pi for d = 2, 4 pi for d = 3.
double sphere_area(int d);

} // namespace broadkin
