#include "broadkin/spectrum.hpp"

#include "broadkin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace broadkin {

namespace {

void check_nodes(const std::vector<double>& nodes, Spacing spacing)
{
    if (nodes.size() < 8) {
        throw PreconditionError("radial grid needs at least 8 nodes, got " +
                                std::to_string(nodes.size()));
    }
    if (!(nodes.front() >= 0.0)) {
        throw PreconditionError("radial grid nodes must be >= 0");
    }
    if (spacing == Spacing::logarithmic && !(nodes.front() > 0.0)) {
        throw PreconditionError("logarithmic grid requires k_0 > 0");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i])) {
            throw PreconditionError("radial grid node " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(nodes[i] > nodes[i - 1])) {
            throw PreconditionError("radial grid nodes must be strictly increasing (node " +
                                    std::to_string(i) + ")");
        }
    }
}

} // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, Spacing spacing)
    : nodes_(std::move(nodes)), spacing_(spacing)
{
    check_nodes(nodes_, spacing_);
    const std::size_t n = nodes_.size();
    weights_.assign(n, 0.0);
    lower_.assign(n, 0.0);
    upper_.assign(n, 0.0);

    if (spacing_ == Spacing::uniform) {
        gen_start_ = nodes_.front();
        gen_step_ = (nodes_.back() - nodes_.front()) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i == 0 ? nodes_[0] : 0.5 * (nodes_[i - 1] + nodes_[i]);
            const double right = i + 1 == n ? nodes_[i] : 0.5 * (nodes_[i] + nodes_[i + 1]);
            lower_[i] = left;
            upper_[i] = right;
            weights_[i] = right - left;
        }
    } else {
        gen_start_ = std::log(nodes_.front());
        gen_step_ = (std::log(nodes_.back()) - gen_start_) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double u_left = i == 0 ? std::log(nodes_[0]) : std::log(nodes_[i - 1]);
            const double u_right = i + 1 == n ? std::log(nodes_[i]) : std::log(nodes_[i + 1]);
            // trapezoid in u = ln k applied to g(k) k
            weights_[i] = 0.5 * nodes_[i] * (u_right - u_left);
            lower_[i] = i == 0 ? nodes_[0] : std::sqrt(nodes_[i - 1] * nodes_[i]);
            upper_[i] = i + 1 == n ? nodes_[i] : std::sqrt(nodes_[i] * nodes_[i + 1]);
        }
    }
}

double RadialGrid::generated_node(std::size_t i) const
{
    const std::size_t n = nodes_.size();
    if (i < n) {
        return nodes_[i];
    }
    const double x = gen_start_ + gen_step_ * static_cast<double>(i);
    return spacing_ == Spacing::uniform ? x : std::exp(x);
}

RadialGrid RadialGrid::make(Spacing spacing, std::size_t n, double k_min, double k_max)
{
    if (n < 8) {
        throw PreconditionError("radial grid needs at least 8 nodes");
    }
    if (!(k_max > k_min)) {
        throw PreconditionError("radial grid needs k_max > k_min");
    }
    std::vector<double> nodes(n);
    const double last = static_cast<double>(n - 1);
    if (spacing == Spacing::uniform) {
        const double h = (k_max - k_min) / last;
        for (std::size_t i = 0; i < n; ++i) {
            nodes[i] = k_min + h * static_cast<double>(i);
        }
    } else {
        if (!(k_min > 0.0)) {
            throw PreconditionError("logarithmic grid requires k_0 > 0");
        }
        const double u0 = std::log(k_min);
        const double du = (std::log(k_max) - u0) / last;
        for (std::size_t i = 0; i < n; ++i) {
            nodes[i] = std::exp(u0 + du * static_cast<double>(i));
        }
    }
    nodes.back() = k_max;
    return RadialGrid(std::move(nodes), spacing);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, Spacing spacing)
{
    return RadialGrid(std::move(nodes), spacing);
}

RadialGrid RadialGrid::extended_to(double k_target) const
{
    std::vector<double> nodes(nodes_.begin(), nodes_.end());
    for (std::size_t i = nodes.size(); nodes.back() < k_target; ++i) {
        nodes.push_back(generated_node(i));
    }
    RadialGrid out(std::move(nodes), spacing_);
    out.gen_start_ = gen_start_;
    out.gen_step_ = gen_step_;
    return out;
}

std::vector<double> RadialGrid::measure(int d) const
{
    const double area = sphere_area(d);
    std::vector<double> mu(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const double radial = d == 3 ? nodes_[i] * nodes_[i] : nodes_[i];
        mu[i] = area * radial * weights_[i];
    }
    return mu;
}

bool RadialGrid::same_nodes(const RadialGrid& other) const
{
    return this == &other || nodes_ == other.nodes_;
}

GridPtr make_grid(Spacing spacing, std::size_t n, double k_min, double k_max)
{
    return std::make_shared<const RadialGrid>(RadialGrid::make(spacing, n, k_min, k_max));
}

RadialSpectrum::RadialSpectrum(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) {
        throw PreconditionError("spectrum requires a grid");
    }
    if (values_.size() != grid_->size()) {
        throw StructuralError("spectrum has " + std::to_string(values_.size()) +
                              " values for a grid of " + std::to_string(grid_->size()) + " nodes");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
            throw PreconditionError("spectrum value at node " + std::to_string(i) +
                                    " must be finite and nonnegative");
        }
    }
}

RadialSpectrum RadialSpectrum::zeros(GridPtr grid)
{
    std::vector<double> v(grid->size(), 0.0);
    return RadialSpectrum(std::move(grid), std::move(v));
}

double RadialSpectrum::min_value() const
{
    return *std::min_element(values_.begin(), values_.end());
}

bool RadialSpectrum::is_zero() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

namespace {

double weighted_sum(const RadialGrid& grid, std::span<const double> values, double order,
                    const DispersionParams& disp, int d)
{
    const auto nodes = grid.nodes();
    const auto w = grid.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (values[i] == 0.0) {
            continue;
        }
        const double k = nodes[i];
        const double radial = d == 3 ? k * k : k;
        acc += w[i] * values[i] * std::pow(omega(k, disp), order) * radial;
    }
    return sphere_area(d) * acc;
}

} // namespace

double moment(const RadialSpectrum& f, double order, const DispersionParams& disp, int d)
{
    if (!(order >= 0.0)) {
        throw DomainError("moment order must be >= 0");
    }
    const double m = weighted_sum(f.grid(), f.values(), order, disp, d);
    if (!std::isfinite(m)) {
        throw OverflowError("moment of order " + std::to_string(order) + " is not finite");
    }
    return m;
}

MomentVector moments(const RadialSpectrum& f, std::span<const double> orders,
                     const DispersionParams& disp, int d)
{
    MomentVector out;
    out.orders.assign(orders.begin(), orders.end());
    out.values.reserve(orders.size());
    for (double m : orders) {
        out.values.push_back(moment(f, m, disp, d));
    }
    return out;
}

double weighted_distance(const RadialSpectrum& g, const RadialSpectrum& h, double order,
                         const DispersionParams& disp, int d)
{
    if (!g.grid().same_nodes(h.grid())) {
        throw StructuralError("weighted_distance: spectra live on different grids");
    }
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = std::abs(g[i] - h[i]);
    }
    const double dist = weighted_sum(g.grid(), diff, order, disp, d);
    if (!std::isfinite(dist)) {
        throw OverflowError("weighted distance of order " + std::to_string(order) +
                            " is not finite");
    }
    return dist;
}

RadialSpectrum truncate(const RadialSpectrum& f, double R)
{
    std::vector<double> v(f.values().begin(), f.values().end());
    const auto nodes = f.grid().nodes();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (nodes[i] > R) {
            v[i] = 0.0;
        }
    }
    return RadialSpectrum(f.grid_ptr(), std::move(v));
}

double interpolate(const RadialSpectrum& f, double k)
{
    const auto nodes = f.grid().nodes();
    if (k < nodes.front() || k > nodes.back()) {
        return 0.0;
    }
    auto it = std::upper_bound(nodes.begin(), nodes.end(), k);
    if (it == nodes.end()) {
        return f[nodes.size() - 1];
    }
    const std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    const std::size_t lo = hi - 1;
    if (k == nodes[lo]) {
        return f[lo];
    }
    const double t = (k - nodes[lo]) / (nodes[hi] - nodes[lo]);
    return (1.0 - t) * f[lo] + t * f[hi];
}

std::vector<double> axpby(double a, const RadialSpectrum& g, double b, const RadialSpectrum& h)
{
    if (!g.grid().same_nodes(h.grid())) {
        throw StructuralError("axpby: spectra live on different grids");
    }
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a * g[i] + b * h[i];
    }
    return out;
}

} // namespace broadkin
