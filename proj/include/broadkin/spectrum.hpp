#pragma once

#include "broadkin/params.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace broadkin {

enum class Spacing { uniform, logarithmic };

/// Strictly increasing wavenumber nodes together with the composite
/// quadrature weights used for every radial integral in the library.
///
/// Uniform grids integrate with the trapezoid rule, logarithmic grids with
/// the trapezoid rule in ln k. Both give nonnegative weights. Each node also
/// owns a cell [cell_lower, cell_upper] (arithmetic midpoints on uniform
/// grids, geometric midpoints on logarithmic ones, half cells at the ends)
/// which the triad quadrature uses to clip cells against the triangle domain.
class RadialGrid {
public:
    static RadialGrid make(Spacing spacing, std::size_t n, double k_min, double k_max);

    /// Adopts explicit nodes. The spacing tag only selects the weight rule and
    /// the rule used to generate nodes beyond the last one.
    static RadialGrid from_nodes(std::vector<double> nodes, Spacing spacing);

    std::size_t size() const { return nodes_.size(); }
    Spacing spacing() const { return spacing_; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    double operator[](std::size_t i) const { return nodes_[i]; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const double> cell_lower() const { return lower_; }
    std::span<const double> cell_upper() const { return upper_; }

    /// Same spacing rule continued until the last node is >= k_target.
    /// Nodes shared with this grid are bitwise identical.
    RadialGrid extended_to(double k_target) const;

    /// Radial measure S_{d-1} k^{d-1} w_i of each node.
    std::vector<double> measure(int d) const;

    bool same_nodes(const RadialGrid& other) const;

private:
    RadialGrid(std::vector<double> nodes, Spacing spacing);
    double generated_node(std::size_t i) const;

    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    Spacing spacing_;
    // Generator parameters used by extended_to().
    double gen_start_ = 0.0;
    double gen_step_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(Spacing spacing, std::size_t n, double k_min, double k_max);

/// Nonnegative radial wave-action density sampled on a grid. Between nodes
/// the density is piecewise linear; outside [k_0, k_{n-1}] it is zero.
class RadialSpectrum {
public:
    RadialSpectrum(GridPtr grid, std::vector<double> values);

    static RadialSpectrum zeros(GridPtr grid);

    template <class F>
    static RadialSpectrum sample(GridPtr grid, F&& fn)
    {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = fn((*grid)[i]);
        }
        return RadialSpectrum(std::move(grid), std::move(v));
    }

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double min_value() const;
    bool is_zero() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

struct MomentVector {
    std::vector<double> orders;
    std::vector<double> values;
};

/// M_order[f] = S_{d-1} int f(k) omega(k)^order k^{d-1} dk on the grid rule.
double moment(const RadialSpectrum& f, double order, const DispersionParams& disp, int d);

MomentVector moments(const RadialSpectrum& f, std::span<const double> orders,
                     const DispersionParams& disp, int d);

/// L^1_order distance; the grids must coincide.
double weighted_distance(const RadialSpectrum& g, const RadialSpectrum& h, double order,
                         const DispersionParams& disp, int d);

/// chi_R f: nodes strictly above R are zeroed.
RadialSpectrum truncate(const RadialSpectrum& f, double R);

double interpolate(const RadialSpectrum& f, double k);

/// Nodewise combination a*g + b*h (values may go negative; callers that need
/// a spectrum must keep the result nonnegative).
std::vector<double> axpby(double a, const RadialSpectrum& g, double b, const RadialSpectrum& h);

} // namespace broadkin
