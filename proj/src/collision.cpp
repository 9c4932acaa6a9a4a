#include "broadkin/collision.hpp"

#include "broadkin/errors.hpp"
#include "broadkin/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace broadkin {

Physics Physics::make(const PhysicalParams& params, const ModelSelection& model)
{
    validate(params);
    return {params, derive_dispersion(params), model};
}

namespace {

constexpr double kDropRatio = 1e-6;

// P(a0 s0 + a1 s1 <= t) for s uniform on the unit square, a0 >= a1 > 0.
double square_below(double a0, double a1, double t)
{
    const double sum = a0 + a1;
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= sum) {
        return 1.0;
    }
    if (t > 0.5 * sum) {
        return 1.0 - square_below(a0, a1, sum - t);
    }
    if (a1 <= kDropRatio * a0) {
        return std::clamp((t - 0.5 * a1) / a0, 0.0, 1.0);
    }
    auto sq = [](double x) { return x > 0.0 ? x * x : 0.0; };
    const double v = sq(t) - sq(t - a0) - sq(t - a1) + sq(t - sum);
    return std::clamp(v / (2.0 * a0 * a1), 0.0, 1.0);
}

// P(a . s <= t) for s uniform on the unit cube, all a > 0.
double cube_below(std::array<double, 3> a, double t)
{
    std::sort(a.begin(), a.end(), std::greater<>());
    const double sum = a[0] + a[1] + a[2];
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= sum) {
        return 1.0;
    }
    if (t > 0.5 * sum) {
        return 1.0 - cube_below(a, sum - t);
    }
    if (a[2] <= kDropRatio * a[0]) {
        return square_below(a[0], a[1], t - 0.5 * a[2]);
    }
    auto cube = [](double x) { return x > 0.0 ? x * x * x : 0.0; };
    const double v = cube(t) - cube(t - a[0]) - cube(t - a[1]) - cube(t - a[2]) +
                     cube(t - a[0] - a[1]) + cube(t - a[0] - a[2]) + cube(t - a[1] - a[2]) -
                     cube(t - sum);
    return std::clamp(v / (6.0 * a[0] * a[1] * a[2]), 0.0, 1.0);
}

// Fraction of the box where coordinate `x` exceeds the sum of the other two.
double violation_fraction(std::size_t x, std::size_t y, std::size_t z,
                          std::span<const double, 3> lo, std::span<const double, 3> hi)
{
    if (hi[x] <= lo[y] + lo[z]) {
        return 0.0;
    }
    if (lo[x] >= hi[y] + hi[z]) {
        return 1.0;
    }
    const double t = hi[y] + hi[z] - lo[x];
    return 1.0 - cube_below({hi[x] - lo[x], hi[y] - lo[y], hi[z] - lo[z]}, t);
}

} // namespace

double triangle_cell_fraction(std::span<const double, 3> lo, std::span<const double, 3> hi)
{
    // The three violation sets are pairwise disjoint for nonnegative
    // coordinates (x > y + z and y > x + z would force z < 0).
    const double v = violation_fraction(0, 1, 2, lo, hi) + violation_fraction(1, 0, 2, lo, hi) +
                     violation_fraction(2, 0, 1, lo, hi);
    return std::clamp(1.0 - v, 0.0, 1.0);
}

TriadQuadrature build_quadrature(const RadialGrid& grid, int d, const QuadratureOptions& options)
{
    if (d != 3) {
        throw PreconditionError("deterministic triad quadrature is implemented for d = 3 only; "
                                "use the Monte Carlo oracle for d = 2");
    }
    TriadQuadrature quad(grid, grid.extended_to(2.0 * grid.back()));
    const RadialGrid& E = quad.nodes_;
    const std::size_t ne = E.size();
    const std::size_t n = grid.size();
    const auto k = E.nodes();
    const auto w = E.weights();
    const auto lower = E.cell_lower();
    const auto upper = E.cell_upper();

    quad.measure_ = E.measure(3);
    quad.zero_source_ = k[0] == 0.0 ? 1 : ne;
    quad.offsets_.assign(ne + 1, 0);

    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    for (std::size_t i = 0; i < ne; ++i) {
        quad.offsets_[i] = quad.triples_.size();
        if (k[i] == 0.0) {
            continue;
        }
        const double prefactor = options.weight_scale * 2.0 * std::numbers::pi / k[i];
        for (std::size_t j = 0; j < ne; ++j) {
            if (k[j] == 0.0) {
                continue;
            }
            // at least two of (i, j, l) must sit inside the support of f
            const int inside_ij = static_cast<int>(i < n) + static_cast<int>(j < n);
            if (inside_ij == 0) {
                continue;
            }
            const double zmin = std::max({0.0, lower[i] - upper[j], lower[j] - upper[i]});
            const double zmax = upper[i] + upper[j];
            auto first = std::upper_bound(upper.begin(), upper.end(), zmin);
            for (auto it = first; it != upper.end(); ++it) {
                const std::size_t l = static_cast<std::size_t>(it - upper.begin());
                if (lower[l] >= zmax) {
                    break;
                }
                if (inside_ij + static_cast<int>(l < n) < 2 || k[l] == 0.0) {
                    continue;
                }
                std::array<std::size_t, 3> idx{i, j, l};
                std::sort(idx.begin(), idx.end());
                for (std::size_t a = 0; a < 3; ++a) {
                    lo[a] = lower[idx[a]];
                    hi[a] = upper[idx[a]];
                }
                const double chi = triangle_cell_fraction(lo, hi);
                if (chi <= 0.0) {
                    continue;
                }
                const double weight = prefactor * (k[j] * k[l]) * (w[j] * w[l]) * chi;
                quad.triples_.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(l), weight});
            }
        }
    }
    quad.offsets_[ne] = quad.triples_.size();
    return quad;
}

namespace {

struct NodeState {
    std::vector<double> k;
    std::vector<double> omega;
    std::vector<double> gamma;
    std::vector<double> f;
    double C2 = 1.0;
    KernelModel kernel = KernelModel::sum_form;
    bool clamp_gamma = false;
    double gamma_floor = 0.0;
};

NodeState prepare(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys)
{
    if (!f.grid().same_nodes(quad.grid())) {
        throw StructuralError("collision: spectrum grid differs from the quadrature grid");
    }
    NodeState s;
    const auto nodes = quad.nodes().nodes();
    s.k.assign(nodes.begin(), nodes.end());
    s.omega.resize(s.k.size());
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        s.omega[i] = omega(s.k[i], phys.disp);
    }
    s.gamma = gamma_table(f, s.k, s.omega, phys.model, phys.params);
    s.f.assign(s.k.size(), 0.0);
    std::copy(f.values().begin(), f.values().end(), s.f.begin());
    s.C2 = phys.params.kernel_constant_C * phys.params.kernel_constant_C;
    s.kernel = phys.model.kernel;
    s.clamp_gamma = phys.model.broadening == BroadeningModel::acoustic_one_loop;
    s.gamma_floor = phys.model.gamma_floor;
    return s;
}

inline double triad_width(const NodeState& s, std::size_t i, std::size_t j, std::size_t l)
{
    const double G = s.gamma[i] + s.gamma[j] + s.gamma[l];
    if (s.clamp_gamma) {
        const double clamped = std::max(G, s.gamma_floor);
        if (!(clamped > 0.0)) {
            throw DomainError("triad broadening vanished under the acoustic model; "
                              "enable gamma_floor");
        }
        return clamped;
    }
    return G;
}

void require_finite(double v, const char* what, std::size_t node)
{
    if (!std::isfinite(v)) {
        throw OverflowError(std::string(what) + " is not finite at node " + std::to_string(node));
    }
}

void fill_zero_node(std::vector<double>& v, const TriadQuadrature& quad)
{
    const std::size_t src = quad.zero_node_source();
    if (src < v.size()) {
        v[0] = v[src];
    }
}

} // namespace

CollisionOutput collision(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys)
{
    const NodeState s = prepare(f, quad, phys);
    const std::size_t ne = quad.node_count();
    CollisionOutput out;
    out.grid_size = quad.grid_size();
    out.gain.assign(ne, 0.0);
    out.loss_frequency.assign(ne, 0.0);
    out.total.assign(ne, 0.0);

    parallel_for(ne, [&](std::size_t i) {
        double gain_acc = 0.0;
        double theta_acc = 0.0;
        const double fi = s.f[i];
        for (const auto& t : quad.triples(i)) {
            const double fj = s.f[t.j];
            const double fl = s.f[t.l];
            if (fj == 0.0 && fl == 0.0) {
                continue;
            }
            const double G = triad_width(s, i, t.j, t.l);
            const double V2 = kernel_squared_fast(s.k[i], s.k[t.j], s.k[t.l], s.kernel, s.C2);
            const double A = V2 * lorentzian_unchecked(s.omega[i] - s.omega[t.j] - s.omega[t.l], G);
            const double B = V2 * lorentzian_unchecked(s.omega[t.j] - s.omega[i] - s.omega[t.l], G);
            gain_acc += t.weight * (A * fj * fl + 2.0 * B * (fi * fj + fj * fl));
            theta_acc += t.weight * 2.0 * (A * fj + B * fl);
        }
        require_finite(gain_acc, "gain", i);
        require_finite(theta_acc, "loss frequency", i);
        out.gain[i] = gain_acc;
        out.loss_frequency[i] = theta_acc;
        out.total[i] = gain_acc - fi * theta_acc;
    });

    fill_zero_node(out.gain, quad);
    fill_zero_node(out.loss_frequency, quad);
    fill_zero_node(out.total, quad);
    return out;
}

std::vector<double> gain(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys)
{
    return collision(f, quad, phys).gain;
}

std::vector<double> loss_frequency(const RadialSpectrum& f, const TriadQuadrature& quad,
                                   const Physics& phys)
{
    return collision(f, quad, phys).loss_frequency;
}

std::vector<double> collision_direct(const RadialSpectrum& f, const TriadQuadrature& quad,
                                     const Physics& phys)
{
    const NodeState s = prepare(f, quad, phys);
    const std::size_t ne = quad.node_count();
    std::vector<double> out(ne, 0.0);

    // N_{a,b,c} = |V|^2 L(omega_a - omega_b - omega_c) (f_b f_c - f_a f_b - f_a f_c)
    auto N = [&](std::size_t a, std::size_t b, std::size_t c, double V2, double G) {
        const double L = lorentzian_unchecked(s.omega[a] - s.omega[b] - s.omega[c], G);
        return V2 * L * (s.f[b] * s.f[c] - s.f[a] * s.f[b] - s.f[a] * s.f[c]);
    };

    parallel_for(ne, [&](std::size_t i) {
        double acc = 0.0;
        for (const auto& t : quad.triples(i)) {
            const double G = triad_width(s, i, t.j, t.l);
            const double V2 = kernel_squared_fast(s.k[i], s.k[t.j], s.k[t.l], s.kernel, s.C2);
            acc += t.weight * (N(i, t.j, t.l, V2, G) - N(t.j, i, t.l, V2, G) - N(t.l, i, t.j, V2, G));
        }
        require_finite(acc, "collision (direct form)", i);
        out[i] = acc;
    });
    fill_zero_node(out, quad);
    return out;
}

double weak_form_apply(const RadialSpectrum& f, std::span<const double> phi,
                       const TriadQuadrature& quad, const Physics& phys)
{
    const std::size_t ne = quad.node_count();
    if (phi.size() != ne) {
        throw StructuralError("weak_form_apply: expected " + std::to_string(ne) +
                              " test-function values, got " + std::to_string(phi.size()));
    }
    const NodeState s = prepare(f, quad, phys);
    const auto mu = quad.measure();
    std::vector<double> per_node(ne, 0.0);

    parallel_for(ne, [&](std::size_t i) {
        double acc = 0.0;
        const double fi = s.f[i];
        for (const auto& t : quad.triples(i)) {
            const double fj = s.f[t.j];
            const double fl = s.f[t.l];
            const double product = fj * fl - fi * fj - fi * fl;
            if (product == 0.0) {
                continue;
            }
            const double G = triad_width(s, i, t.j, t.l);
            const double V2 = kernel_squared_fast(s.k[i], s.k[t.j], s.k[t.l], s.kernel, s.C2);
            const double L = lorentzian_unchecked(s.omega[i] - s.omega[t.j] - s.omega[t.l], G);
            acc += t.weight * V2 * L * product * (phi[i] - phi[t.j] - phi[t.l]);
        }
        per_node[i] = mu[i] * acc;
    });

    double total = 0.0;
    for (double v : per_node) {
        total += v;
    }
    if (!std::isfinite(total)) {
        throw OverflowError("weak-form triple integral is not finite");
    }
    return total;
}

double weak_form_apply(const RadialSpectrum& f, const std::function<double(double)>& phi,
                       const TriadQuadrature& quad, const Physics& phys)
{
    return weak_form_apply(f, sample_on_nodes(quad, phi), quad, phys);
}

double integrate_nodes(std::span<const double> values, std::span<const double> phi,
                       const TriadQuadrature& quad)
{
    const auto mu = quad.measure();
    if (values.size() != mu.size() || phi.size() != mu.size()) {
        throw StructuralError("integrate_nodes: value count does not match quadrature nodes");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += mu[i] * values[i] * phi[i];
    }
    return acc;
}

std::vector<double> sample_on_nodes(const TriadQuadrature& quad,
                                    const std::function<double(double)>& phi)
{
    const auto nodes = quad.nodes().nodes();
    std::vector<double> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out[i] = phi(nodes[i]);
    }
    return out;
}

} // namespace broadkin
