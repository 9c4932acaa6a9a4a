#pragma once

#include "broadkin/collision.hpp"

#include <cstdint>

namespace broadkin {

enum class Stratification { none, radial_shells };

struct McConfig {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    // Radius of the sampling ball. Zero selects support + k, the smallest
    // ball that contains every momentum with a nonzero integrand.
    double sampling_radius = 0.0;
    Stratification stratification = Stratification::none;
    int shells = 16;
    int dimension = 3;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples_used = 0;
};

/// Plain Monte Carlo estimates of the collision integrals at |p| = k, drawn
/// directly in R^d: the momentum delta is resolved by substitution
/// (p2 = p - p1 for first-type triads, p1 = p + p2 for second-type ones) and
/// the free momentum is sampled uniformly in a ball. No radial reduction is
/// used, which keeps the estimator independent of TriadQuadrature.
///
/// Every term draws from its own stream derived from (seed, k, term), so
/// repeated calls are bit-identical and different terms are independent.
McEstimate mc_gain(const RadialSpectrum& f, double k, const McConfig& cfg, const Physics& phys);
McEstimate mc_loss_frequency(const RadialSpectrum& f, double k, const McConfig& cfg,
                             const Physics& phys);
McEstimate mc_collision(const RadialSpectrum& f, double k, const McConfig& cfg, const Physics& phys);

} // namespace broadkin
