#include "broadkin/broadening.hpp"

#include "broadkin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace broadkin {

BroadeningModel parse_broadening_model(std::string_view name)
{
    if (name == "ocean" || name == "ocean_induced_diffusion") {
        return BroadeningModel::ocean_induced_diffusion;
    }
    if (name == "acoustic" || name == "acoustic_one_loop") {
        return BroadeningModel::acoustic_one_loop;
    }
    throw ParseError("unknown broadening model '" + std::string(name) + "' (ocean | acoustic)");
}

KernelModel parse_kernel_model(std::string_view name)
{
    if (name == "sum" || name == "sum_form") {
        return KernelModel::sum_form;
    }
    if (name == "product" || name == "product_form") {
        return KernelModel::product_form;
    }
    throw ParseError("unknown kernel model '" + std::string(name) + "' (sum | product)");
}

std::string_view to_string(BroadeningModel m)
{
    return m == BroadeningModel::ocean_induced_diffusion ? "ocean" : "acoustic";
}

std::string_view to_string(KernelModel m)
{
    return m == KernelModel::sum_form ? "sum" : "product";
}

double acoustic_line_integral(const RadialSpectrum& f)
{
    const auto nodes = f.grid().nodes();
    const auto w = f.grid().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        acc += w[i] * nodes[i] * nodes[i] * f[i];
    }
    if (!std::isfinite(acc)) {
        throw OverflowError("acoustic broadening integral is not finite");
    }
    return acc;
}

double gamma_mode(const RadialSpectrum& f, double k, const ModelSelection& model,
                  const DispersionParams& disp, const PhysicalParams& params)
{
    if (model.broadening == BroadeningModel::ocean_induced_diffusion) {
        const double wf = omega(k, disp) * interpolate(f, k);
        return params.broadening_c1 * std::max(wf, params.broadening_floor_c2);
    }
    return k * k * acoustic_line_integral(f);
}

std::vector<double> gamma_table(const RadialSpectrum& f, std::span<const double> nodes,
                                std::span<const double> omegas, const ModelSelection& model,
                                const PhysicalParams& params)
{
    std::vector<double> out(nodes.size());
    if (model.broadening == BroadeningModel::ocean_induced_diffusion) {
        const double c1 = params.broadening_c1;
        const double c2 = params.broadening_floor_c2;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double fi = i < f.size() ? f[i] : 0.0;
            out[i] = c1 * std::max(omegas[i] * fi, c2);
        }
    } else {
        const double line = acoustic_line_integral(f);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            out[i] = nodes[i] * nodes[i] * line;
        }
    }
    return out;
}

TriadBroadening triad_broadening(const RadialSpectrum& f, double k, double k1, double k2,
                                 const ModelSelection& model, const DispersionParams& disp,
                                 const PhysicalParams& params)
{
    TriadBroadening t;
    t.gamma_k = gamma_mode(f, k, model, disp, params);
    t.gamma_k1 = gamma_mode(f, k1, model, disp, params);
    t.gamma_k2 = gamma_mode(f, k2, model, disp, params);
    t.Gamma_total = t.gamma_k + t.gamma_k1 + t.gamma_k2;
    if (model.broadening == BroadeningModel::acoustic_one_loop) {
        t.Gamma_total = std::max(t.Gamma_total, model.gamma_floor);
    }
    return t;
}

double lorentzian(double delta, double Gamma)
{
    if (!(Gamma > 0.0)) {
        throw DomainError("lorentzian requires Gamma > 0, got " + std::to_string(Gamma));
    }
    return lorentzian_unchecked(delta, Gamma);
}

double kernel_squared(double k, double k1, double k2, KernelModel kernel, double C)
{
    return kernel_squared_fast(k, k1, k2, kernel, C * C);
}

} // namespace broadkin
