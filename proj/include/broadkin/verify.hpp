#pragma once

#include "broadkin/collision.hpp"
#include "broadkin/mc_oracle.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace broadkin {

struct CheckReport {
    std::string check_name;
    std::size_t trials = 0;
    double worst_ratio = 0.0;
    double bound_used = 0.0;
    bool passed = true;
    std::uint64_t seed = 0;
    std::size_t skipped = 0;
    std::string detail; // free-form, no commas
};

/// Shared state for a check suite: physics, grid and the quadrature built on it.
struct VerifyContext {
    Physics phys;
    GridPtr grid;
    TriadQuadrature quad;

    static VerifyContext make(const Physics& phys, GridPtr grid, const QuadratureOptions& options = {});
};

/// Random spectra: sums of 1 to 4 log-normal bumps with random centers,
/// widths and amplitudes, rescaled so that max(M_0, M_{order}) equals
/// radius * u with u uniform in [0.1, 1].
struct SpectrumFamily {
    double order = 4.0;
    double radius = 10.0;
    double center_min = 0.3;
    double center_max = 1.2;
    double width_min = 0.1;  // in ln k
    double width_max = 0.3;
};

/// Counter-based generator: the same (seed, stream) always yields the same
/// sequence on every platform.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    double uniform(); // [0, 1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::uint64_t state_;
};

RadialSpectrum random_spectrum(const VerifyContext& ctx, const SpectrumFamily& family, Rng& rng);
RadialSpectrum random_spectrum(const GridPtr& grid, const Physics& phys, const SpectrumFamily& family,
                               Rng& rng);

/// Nodal relative tolerance used by the algebraic identity checks.
inline constexpr double identity_tolerance = 1e-10;

/// |int C[f] phi - weak_form_apply(f, phi)| / (1 + |int C[f] phi|) for
/// phi in {1, omega, omega^m}.
CheckReport check_weak_formulation(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                                   double m, const SpectrumFamily& family = {});

/// gain - f theta against the unsymmetrised direct form, nodewise, relative
/// to |gain| + f theta.
CheckReport check_gain_loss_identity(const VerifyContext& ctx, std::size_t trials,
                                     std::uint64_t seed, const SpectrumFamily& family = {});

/// int gain omega^m / M_{m+2} against K = K0(m) * radius, which dominates it
/// on a family with M_0 <= radius.
CheckReport check_gain_bound(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                             double m, const SpectrumFamily& family = {});

/// max_k theta[f](k) / (A1 k^2 + A2) against 1.
CheckReport check_loss_bound(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                             const SpectrumFamily& family = {});

struct HolderResult {
    CheckReport report;
    std::vector<double> distances;   // one per decade
    std::vector<double> max_ratio;   // per decade, over all pairs
    double slope_toward_zero = 0.0;  // d log(ratio) / d log(1/distance)
    double slope_vs_distance = 0.0;  // d log(ratio) / d log(distance)
    double ratio_sup = 0.0;
};

/// ||C[g] - C[h]||_{L^1_m} / ||g - h||^{1/2}_{L^1_{m+2}} with h = g + s delta
/// and ||delta||_{m+2} = 1, s over `decades` decades ending at 1. A Hoelder-1/2
/// violation shows as the ratio growing while the distance shrinks, so the
/// check fits the slope of the per-decade maximum against log(1/distance)
/// and passes when it is at most slope_limit.
HolderResult check_holder(const VerifyContext& ctx, std::size_t pairs, std::uint64_t seed, double m,
                          int decades = 7, double slope_limit = 0.05,
                          const SpectrumFamily& family = {});

/// bracket(Q[f] - Q[g], f - g, m) / ||f - g||_{L^1_m}. No explicit one-sided
/// constant is frozen; the bound is the two-sided ratio
/// ||C[f] - C[g]||_{L^1_m} / ||f - g||_{L^1_m} of the same pair, which
/// dominates the bracket because damping only subtracts.
CheckReport check_lipschitz_bracket(const VerifyContext& ctx, std::size_t trials,
                                    std::uint64_t seed, double m, const SpectrumFamily& family = {});

struct DeltaLimitResult {
    CheckReport report;
    std::vector<double> gammas;
    std::vector<double> errors;
};

/// |int L(D, Gamma) phi(D) dD - pi phi(0)| for phi(D) = exp(-D^2 / 2), by
/// adaptive Gauss-Kronrod after D = Gamma tan(t). Passes when the error
/// decreases strictly and the last one is below final_limit.
DeltaLimitResult check_delta_limit(const std::vector<double>& gammas, double final_limit = 1e-2);

struct McComparison {
    std::size_t spectrum = 0;
    std::string term; // collision | gain | loss_frequency
    double k = 0.0;
    double deterministic = 0.0;
    McEstimate mc;
    double nodal_max = 0.0;
    bool within_se = false;
    bool within_rel = false;
};

struct McCrossResult {
    CheckReport report;
    std::vector<McComparison> rows;
};

struct McCrossOptions {
    std::size_t spectra = 5;
    std::size_t nodes = 8;
    std::uint64_t samples = 1'000'000;
    double se_limit = 3.0;
    double rel_limit = 0.05;
    double rel_floor = 1e-6; // relative test applies where |value| > rel_floor * nodal max
};

/// Deterministic collision, gain and theta against the Monte Carlo oracle at
/// evenly spread interior nodes of several random spectra.
McCrossResult check_mc_oracle(const VerifyContext& ctx, std::uint64_t seed,
                              const McCrossOptions& options = {}, const SpectrumFamily& family = {});

struct SuiteOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    double order = 2.0;
    double family_radius = 10.0;
    std::size_t gain_trials = 1000;
    std::size_t holder_pairs = 50;
    int holder_decades = 7;
    double holder_slope_limit = 0.05;
    std::vector<double> delta_gammas{1.0, 0.1, 0.01, 0.001};
    McCrossOptions mc;
};

struct SuiteResult {
    std::vector<CheckReport> reports;
    std::vector<McComparison> mc_rows;
    bool passed() const;
};

/// Every check once, in a fixed order.
SuiteResult run_suite(const VerifyContext& ctx, const SuiteOptions& options);

void write_reports_csv(std::ostream& out, const std::vector<CheckReport>& reports);
void write_mc_csv(std::ostream& out, const std::vector<McComparison>& rows);

} // namespace broadkin
