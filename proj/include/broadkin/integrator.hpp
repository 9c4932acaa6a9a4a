#pragma once

#include "broadkin/collision.hpp"
#include "broadkin/errors.hpp"
#include "broadkin/spectrum.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace broadkin {

/// Constants certified by the a priori estimates for the default model pair
/// (ocean broadening, sum kernel).
struct AnalyticConstants {
    double gain_order = 0.0;      // moment order the gain constant was derived for
    double gain_bilinear = 0.0;   // K0: int C_gain omega^m <= K0 M_0 M_{m+2}
    double mass_bound = 0.0;      // B: M_0 stays below B on [0, T]
    double gain_constant_K = 0.0; // K = K0 B
    double C_hat = 0.0;           // sup_k K omega(k)^2 - 2 nu k^gamma
    double gronwall_Ctilde = 1.0; // max(2 C_hat, 1)
    double theta_star = 1.0;
    double loss_A1 = 0.0;
    double loss_A2 = 0.0;
    double varsigma = 1.0;
    double horizon_T = 0.0;
};

struct GronwallConstants {
    double C_hat = 0.0;
    double Ctilde = 1.0;
    double theta_star = 1.0;
};

struct LossConstants {
    double A1 = 0.0;
    double A2 = 0.0;
};

/// Factor D with omega(p)^m <= D (omega(p1)^m + omega(p2)^m) whenever
/// |p| <= |p1| + |p2|, built on omega(p) <= 2 omega(p1) + 2 omega(p2).
double doubling_factor(double m);

/// K0(m) with int C_gain[g] omega^m dp <= K0 M_0[g] M_{m+2}[g] for every
/// nonnegative g. Only proven for the default model pair.
///
/// Composition, with Q = C^2 / (c1 c2):
///   |V|^2 L <= 3 C^2 (k^2 + k1^2 + k2^2) / (3 c1 c2)       (Gamma >= 3 c1 c2)
///   k^2 + k1^2 + k2^2 <= 3 (k1^2 + k2^2) <= 3 (w1^2 + w2^2) / Lambda2
///   omega^m <= D_m (w1^m + w2^m)
///   M_a M_b <= M_0 M_{a+b}                                 (Chebyshev)
/// The first-type gain term gives 12 Q D_m / Lambda2, the two second-type
/// pieces 12 Q / Lambda2 and 24 Q D_m / Lambda2, so
///   K0 = 12 Q (3 D_m + 1) / Lambda2.
double gain_constant_bilinear(const Physics& phys, double m);

/// Linear-in-M_{m+2} gain constant on a family with M_0 <= mass_bound.
double derive_gain_constant(const Physics& phys, double m, double mass_bound);

/// C_hat = sup_{k >= 0} K (Lambda1 + Lambda2 k^2) - 2 nu k^gamma in closed
/// form, Ctilde = max(2 C_hat, 1), theta* = Ctilde.
GronwallConstants derive_gronwall(const Physics& phys, double gain_constant);

/// theta[f](k) <= A1 k^2 + A2 with
///   A1 = (32/3) Q M_0[f0],  A2 = (32/3) Q M_2[f0] / Lambda2.
/// Each of the two loss integrals contributes (16/3) Q (k^2 M_0 + int k^2 f),
/// from (k + k1 + |p - p1|)^2 <= 4 (k + k1)^2 <= 8 (k^2 + k1^2).
LossConstants derive_loss_constants(const RadialSpectrum& f0, const Physics& phys);

/// h_R / 2 = 1 / (2 ((A1 R^2 + A2) e^{Ctilde T} + 2 nu R^gamma)).
double step_size_bound(double R, const AnalyticConstants& consts, double T,
                       const PhysicalParams& params);

struct ConstantsOptions {
    double working_order = 2.0;                // m; L^1_{m+3} is the solution-set norm
    std::vector<double> monitored_orders{0.0, 2.0, 5.0};
};

/// Full constant set for a run from f0 over [0, T].
///
/// The gain estimate is bilinear, so the linear constant needs a bound B on
/// M_0 over the whole horizon. B = lambda M_0[f0] is chosen by the fixed
/// point lambda = exp(Ctilde(B) T), iterated from lambda = e^T; when the
/// iteration diverges the data are too large for a certified run and a
/// PreconditionError is raised.
AnalyticConstants derive_constants(const RadialSpectrum& f0, const Physics& phys, double T,
                                   const ConstantsOptions& options = {});

/// Largest M_0[f0] for which the fixed point above closes. The constants grow
/// like K^3 / nu^2, so at desk-scale parameters this is a small number.
double certified_mass_limit(const Physics& phys, double T, const ConstantsOptions& options = {});

/// Q[f] = C[f] - 2 nu k^gamma f on the grid nodes.
std::vector<double> rhs(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys);

/// One truncated explicit step w = f + h Q[f_R]. Requires 0 < h < h_R / 2.
RadialSpectrum euler_step(const RadialSpectrum& f, double h, double R, const TriadQuadrature& quad,
                          const AnalyticConstants& consts, const Physics& phys);

struct StepRecord {
    double time = 0.0;
    double dt = 0.0;
    double truncation_R = 0.0;
    double min_value = 0.0;
    MomentVector moments;
    std::vector<double> gronwall_envelopes; // e^{Ctilde t} M_m(0) per monitored order
    double gronwall_margin = 0.0;           // min over orders of (envelope - M_m) / envelope
    double omega_set_norm = 0.0;            // ||f||_{L^1_{m+3}}
    double omega_set_margin = 0.0;          // (2 varsigma + 1) e^{theta* t} - ||f||_{L^1_{m+3}}
    double mass_margin = 0.0;               // B - M_0
    double subtangent_ratio = 0.0;          // (M_{m+3}[w] - M_{m+3}[f]) / (h ||f||_{m+3})
    std::size_t clamp_events = 0;           // Heun stepper only
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, StepRecord record)
        : Error(what), record_(std::move(record))
    {
    }
    const StepRecord& record() const { return record_; }

private:
    StepRecord record_;
};

enum class Stepper { euler, heun };

struct EvolveConfig {
    std::optional<double> dt;           // default: step_size_bound / 2
    std::optional<double> truncation_R; // default: last grid node
    ConstantsOptions constants;
    double tolerance = 1e-6;
    Stepper stepper = Stepper::euler;
    std::size_t snapshot_every = 0; // 0: initial and final only
};

struct Snapshot {
    double time = 0.0;
    RadialSpectrum spectrum;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<StepRecord> records;
    AnalyticConstants constants;
    double step = 0.0; // nominal step size
};

/// Time integration from f0 to T with every monitor checked at every step.
/// Throws IntegrationError carrying the failing record when a monitor trips.
Trajectory evolve(const RadialSpectrum& f0, double T, const TriadQuadrature& quad,
                  const Physics& phys, const EvolveConfig& cfg = {});

/// int phi sign(psi) omega^m dp on the grid of the spectra, sign(0) = 0.
double bracket(std::span<const double> phi, std::span<const double> psi, double order,
               const RadialGrid& grid, const DispersionParams& disp, int d);

/// L^1_order norm of nodal values that may be signed.
double signed_norm(std::span<const double> values, double order, const RadialGrid& grid,
                   const DispersionParams& disp, int d);

} // namespace broadkin
