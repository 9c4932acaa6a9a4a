#pragma once

#include "broadkin/params.hpp"
#include "broadkin/spectrum.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace broadkin {

enum class BroadeningModel {
    ocean_induced_diffusion, // gamma_p = c1 max{omega f, c2}
    acoustic_one_loop,       // gamma_p = |p|^2 int kappa^2 f(kappa) dkappa
};

enum class KernelModel {
    sum_form,     // V = C (|p| + |p1| + |p2|)
    product_form, // V = C (|p||p1||p2|)^{1/2}
};

struct ModelSelection {
    BroadeningModel broadening = BroadeningModel::ocean_induced_diffusion;
    KernelModel kernel = KernelModel::sum_form;
    // Lower clamp for the triad width under the acoustic model, where Gamma
    // vanishes off the support of f. Zero disables the clamp.
    double gamma_floor = 1e-12;

    bool is_default() const
    {
        return broadening == BroadeningModel::ocean_induced_diffusion &&
               kernel == KernelModel::sum_form;
    }
};

BroadeningModel parse_broadening_model(std::string_view name);
KernelModel parse_kernel_model(std::string_view name);
std::string_view to_string(BroadeningModel m);
std::string_view to_string(KernelModel m);

struct TriadBroadening {
    double gamma_k = 0.0;
    double gamma_k1 = 0.0;
    double gamma_k2 = 0.0;
    double Gamma_total = 0.0;
};

/// Line integral int_0^inf kappa^2 f(kappa) dkappa on the grid rule.
double acoustic_line_integral(const RadialSpectrum& f);

double gamma_mode(const RadialSpectrum& f, double k, const ModelSelection& model,
                  const DispersionParams& disp, const PhysicalParams& params);

/// Per-node single-mode rates for nodes that may extend past the grid of f
/// (f is zero there). Nodes shared with f's grid use the nodal value of f.
std::vector<double> gamma_table(const RadialSpectrum& f, std::span<const double> nodes,
                                std::span<const double> omegas, const ModelSelection& model,
                                const PhysicalParams& params);

TriadBroadening triad_broadening(const RadialSpectrum& f, double k, double k1, double k2,
                                 const ModelSelection& model, const DispersionParams& disp,
                                 const PhysicalParams& params);

/// Gamma / (delta^2 + Gamma^2). Throws DomainError for Gamma <= 0.
double lorentzian(double delta, double Gamma);

inline double lorentzian_unchecked(double delta, double Gamma)
{
    return Gamma / (delta * delta + Gamma * Gamma);
}

double kernel_squared(double k, double k1, double k2, KernelModel kernel, double C);

inline double kernel_squared_fast(double k, double k1, double k2, KernelModel kernel, double C2)
{
    if (kernel == KernelModel::sum_form) {
        const double s = k + k1 + k2;
        return C2 * s * s;
    }
    return C2 * k * k1 * k2;
}

} // namespace broadkin
