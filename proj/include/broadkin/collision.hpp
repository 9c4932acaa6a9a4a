#pragma once

#include "broadkin/broadening.hpp"
#include "broadkin/params.hpp"
#include "broadkin/spectrum.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace broadkin {

/// Everything the collision operator needs besides the spectrum.
struct Physics {
    PhysicalParams params;
    DispersionParams disp;
    ModelSelection model;

    static Physics make(const PhysicalParams& params, const ModelSelection& model = {});
};

struct QuadratureOptions {
    // Multiplies every triad weight. Only used to build deliberately broken
    // quadratures for oracle fault-injection tests.
    double weight_scale = 1.0;
};

/// Deterministic triad quadrature for radial spectra in d = 3.
///
/// The momentum delta is reduced analytically: for fixed |p| = k,
/// int dp1 F(|p1|, |p - p1|) = (2 pi / k) iint_T k1 k2 F(k1, k2) dk1 dk2 over
/// the triangle T = {|k1 - k2| <= k <= k1 + k2}. The same density serves the
/// second-type triads p1 = p + p2. The (k1, k2) integral uses the product of
/// the 1-D node weights, and each node triple carries the fraction of its
/// cell box that lies inside the triangle cone, so the full weight
///
///   W(i, j, l) = 8 pi^2 k_i k_j k_l w_i w_j w_l chi_ijl
///
/// is symmetric in (i, j, l). Symmetry makes the discrete weak formulation
/// hold exactly. Nodes run past the grid to twice its last node so that
/// every triad with two members inside the support is represented; f is
/// zero on the extension.
class TriadQuadrature {
public:
    struct Triple {
        std::uint32_t j;
        std::uint32_t l;
        double weight; // (2 pi / k_i) k_j k_l w_j w_l chi
    };

    const RadialGrid& grid() const { return grid_; }
    const RadialGrid& nodes() const { return nodes_; }
    std::size_t grid_size() const { return grid_.size(); }
    std::size_t node_count() const { return nodes_.size(); }
    int dimension() const { return 3; }

    /// Radial measure of each quadrature node (4 pi k^2 w).
    std::span<const double> measure() const { return measure_; }

    std::span<const Triple> triples(std::size_t i) const
    {
        return {triples_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    std::size_t triple_count() const { return triples_.size(); }

    /// Index of the node whose value is copied into a k = 0 output node, or
    /// node_count() when no such node exists.
    std::size_t zero_node_source() const { return zero_source_; }

private:
    friend TriadQuadrature build_quadrature(const RadialGrid&, int, const QuadratureOptions&);

    RadialGrid grid_;
    RadialGrid nodes_;
    std::vector<double> measure_;
    std::vector<std::size_t> offsets_;
    std::vector<Triple> triples_;
    std::size_t zero_source_ = 0;

    TriadQuadrature(RadialGrid grid, RadialGrid nodes) : grid_(std::move(grid)), nodes_(std::move(nodes)) {}
};

TriadQuadrature build_quadrature(const RadialGrid& grid, int d, const QuadratureOptions& options = {});

/// Fraction of the box [lo, hi]^3 (per axis) lying in the triangle cone
/// {x <= y + z, y <= x + z, z <= x + y}. Symmetric under axis permutation.
double triangle_cell_fraction(std::span<const double, 3> lo, std::span<const double, 3> hi);

/// Per-node outputs on all quadrature nodes (grid nodes first, then the
/// extension where f is zero).
struct CollisionOutput {
    std::vector<double> gain;
    std::vector<double> loss_frequency;
    std::vector<double> total;
    std::size_t grid_size = 0;

    std::span<const double> grid_total() const { return {total.data(), grid_size}; }
};

std::vector<double> gain(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys);
std::vector<double> loss_frequency(const RadialSpectrum& f, const TriadQuadrature& quad,
                                   const Physics& phys);
CollisionOutput collision(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys);

/// C[f] evaluated straight from N_{p,p1,p2} - N_{p1,p,p2} - N_{p2,p,p1}
/// without the p1 <-> p2 symmetrisation used by the gain/loss split.
std::vector<double> collision_direct(const RadialSpectrum& f, const TriadQuadrature& quad,
                                     const Physics& phys);

/// Triple-integral side of the weak formulation:
/// sum over triads of W N_{p,p1,p2}[f] (phi(k) - phi(k1) - phi(k2)).
/// phi holds one value per quadrature node.
double weak_form_apply(const RadialSpectrum& f, std::span<const double> phi,
                       const TriadQuadrature& quad, const Physics& phys);

double weak_form_apply(const RadialSpectrum& f, const std::function<double(double)>& phi,
                       const TriadQuadrature& quad, const Physics& phys);

/// int g(p) phi(p) dp over the quadrature nodes, g and phi given per node.
double integrate_nodes(std::span<const double> values, std::span<const double> phi,
                       const TriadQuadrature& quad);

/// phi(k) sampled on the quadrature nodes.
std::vector<double> sample_on_nodes(const TriadQuadrature& quad,
                                    const std::function<double(double)>& phi);

} // namespace broadkin
