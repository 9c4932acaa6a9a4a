#include "broadkin/mc_oracle.hpp"

#include "broadkin/errors.hpp"
#include "broadkin/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace broadkin {

namespace {

enum class Term : std::uint64_t {
    gain_first = 1,
    gain_second,
    loss_first,
    loss_second,
    collision_first,
    collision_second,
    collision_third,
};

constexpr std::uint64_t kBatch = 1u << 16;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, double k, Term term, std::uint64_t batch)
{
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ std::bit_cast<std::uint64_t>(k));
    s = splitmix64(s ^ static_cast<std::uint64_t>(term));
    return splitmix64(s ^ batch);
}

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

using Vec = std::array<double, 3>;

double norm(const Vec& v, int d)
{
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
        s += v[a] * v[a];
    }
    return std::sqrt(s);
}

// Running mean / M2 (Welford) with Chan's pairwise merge.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x)
    {
        n += 1.0;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0.0) {
            return;
        }
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * o.n / total;
        m2 += o.m2 + delta * delta * n * o.n / total;
        n = total;
    }

    double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
};

double ball_volume(double R, int d)
{
    return d == 2 ? std::numbers::pi * R * R : 4.0 / 3.0 * std::numbers::pi * R * R * R;
}

double support_radius(const RadialSpectrum& f)
{
    const auto nodes = f.grid().nodes();
    for (std::size_t i = f.size(); i-- > 0;) {
        if (f[i] > 0.0) {
            return i + 1 < nodes.size() ? nodes[i + 1] : nodes[i];
        }
    }
    return 0.0;
}

class Integrand {
public:
    Integrand(const RadialSpectrum& f, double k, const Physics& phys)
        : f_(f), phys_(phys), k_(k)
    {
        if (phys.model.broadening == BroadeningModel::acoustic_one_loop) {
            acoustic_line_ = acoustic_line_integral(f);
        }
        C2_ = phys.params.kernel_constant_C * phys.params.kernel_constant_C;
        fk_ = interpolate(f, k);
        wk_ = omega(k, phys.disp);
        gk_ = mode_rate(k, fk_, wk_);
    }

    // The momentum p sits on the first axis; q is the sampled momentum.
    double evaluate(Term term, const Vec& q, int d) const
    {
        Vec shifted = q;
        const double q_norm = norm(q, d);
        double other_norm = 0.0;
        switch (term) {
        case Term::gain_first:
        case Term::loss_first:
        case Term::collision_first:
            shifted[0] = k_ - q[0]; // p2 = p - p1
            for (int a = 1; a < d; ++a) {
                shifted[a] = -q[a];
            }
            other_norm = norm(shifted, d);
            break;
        default:
            shifted[0] = k_ + q[0]; // p1 = p + p2, or p2 = p + p1
            other_norm = norm(shifted, d);
            break;
        }

        switch (term) {
        case Term::gain_first:
        case Term::loss_first:
        case Term::collision_first: {
            const double k1 = q_norm;
            const double k2 = other_norm;
            const double f1 = interpolate(f_, k1);
            const double f2 = interpolate(f_, k2);
            const double A = amplitude(k1, f1, k2, f2, /*first_type=*/true);
            if (term == Term::gain_first) {
                return A * f1 * f2;
            }
            if (term == Term::loss_first) {
                return 2.0 * A * f1;
            }
            return A * (f1 * f2 - fk_ * f1 - fk_ * f2);
        }
        case Term::gain_second:
        case Term::loss_second:
        case Term::collision_second: {
            // sampled q is p2, p1 = p + p2
            const double k2 = q_norm;
            const double k1 = other_norm;
            const double f1 = interpolate(f_, k1);
            const double f2 = interpolate(f_, k2);
            const double B = amplitude(k1, f1, k2, f2, /*first_type=*/false);
            if (term == Term::gain_second) {
                return 2.0 * B * (fk_ * f1 + f1 * f2);
            }
            if (term == Term::loss_second) {
                return 2.0 * B * f2;
            }
            // -N_{p1,p,p2}
            return -B * (fk_ * f2 - f1 * fk_ - f1 * f2);
        }
        case Term::collision_third: {
            // sampled q is p1, p2 = p + p1: -N_{p2,p,p1}
            const double k1 = q_norm;
            const double k2 = other_norm;
            const double f1 = interpolate(f_, k1);
            const double f2 = interpolate(f_, k2);
            const double w1 = omega(k1, phys_.disp);
            const double w2 = omega(k2, phys_.disp);
            const double G = width(k1, f1, w1, k2, f2, w2);
            const double V2 = kernel_squared_fast(k2, k_, k1, phys_.model.kernel, C2_);
            const double L = lorentzian_unchecked(w2 - wk_ - w1, G);
            return -V2 * L * (fk_ * f1 - f2 * fk_ - f2 * f1);
        }
        }
        return 0.0;
    }

private:
    double mode_rate(double k, double fval, double w) const
    {
        if (phys_.model.broadening == BroadeningModel::ocean_induced_diffusion) {
            return phys_.params.broadening_c1 * std::max(w * fval, phys_.params.broadening_floor_c2);
        }
        return k * k * acoustic_line_;
    }

    double width(double k1, double f1, double w1, double k2, double f2, double w2) const
    {
        double G = gk_ + mode_rate(k1, f1, w1) + mode_rate(k2, f2, w2);
        if (phys_.model.broadening == BroadeningModel::acoustic_one_loop) {
            G = std::max(G, phys_.model.gamma_floor);
            if (!(G > 0.0)) {
                throw DomainError("triad broadening vanished under the acoustic model");
            }
        }
        return G;
    }

    // |V|^2 L for first-type (p = p1 + p2) or second-type (p1 = p + p2) triads.
    double amplitude(double k1, double f1, double k2, double f2, bool first_type) const
    {
        const double w1 = omega(k1, phys_.disp);
        const double w2 = omega(k2, phys_.disp);
        const double G = width(k1, f1, w1, k2, f2, w2);
        const double V2 = kernel_squared_fast(k_, k1, k2, phys_.model.kernel, C2_);
        const double delta = first_type ? wk_ - w1 - w2 : w1 - wk_ - w2;
        return V2 * lorentzian_unchecked(delta, G);
    }

    const RadialSpectrum& f_;
    const Physics& phys_;
    double k_;
    double C2_ = 1.0;
    double acoustic_line_ = 0.0;
    double fk_ = 0.0;
    double wk_ = 0.0;
    double gk_ = 0.0;
};

Vec random_direction(Uniform& u, int d)
{
    // Box-Muller normals, normalised.
    Vec v{0.0, 0.0, 0.0};
    for (;;) {
        for (int a = 0; a < d; a += 2) {
            const double r = std::sqrt(-2.0 * std::log(1.0 - u()));
            const double phi = 2.0 * std::numbers::pi * u();
            v[a] = r * std::cos(phi);
            if (a + 1 < d) {
                v[a + 1] = r * std::sin(phi);
            }
        }
        const double n = norm(v, d);
        if (n > 0.0) {
            for (int a = 0; a < d; ++a) {
                v[a] /= n;
            }
            return v;
        }
    }
}

McEstimate estimate_term(const RadialSpectrum& f, double k, const McConfig& cfg,
                         const Physics& phys, Term term)
{
    if (cfg.samples < 1) {
        throw DomainError("Monte Carlo estimate needs at least one sample");
    }
    if (cfg.dimension != 2 && cfg.dimension != 3) {
        throw DomainError("Monte Carlo oracle supports d = 2 or d = 3");
    }
    if (!(k >= 0.0)) {
        throw DomainError("Monte Carlo oracle needs k >= 0");
    }
    const int d = cfg.dimension;
    const double support = support_radius(f);
    const double needed = support + k;
    const double R = cfg.sampling_radius > 0.0 ? cfg.sampling_radius : needed;
    if (cfg.sampling_radius > 0.0 && R < needed) {
        throw PreconditionError("sampling_radius must cover support + k for an unbiased estimate");
    }
    if (support == 0.0) {
        return {0.0, 0.0, cfg.samples};
    }
    const Integrand integrand(f, k, phys);
    const double volume = ball_volume(R, d);

    if (cfg.stratification == Stratification::none) {
        const std::uint64_t batches = (cfg.samples + kBatch - 1) / kBatch;
        std::vector<Moments> partial(batches);
        parallel_for(batches, [&](std::size_t b) {
            Uniform u(stream_seed(cfg.seed, k, term, b));
            const std::uint64_t count = std::min<std::uint64_t>(kBatch, cfg.samples - b * kBatch);
            Moments acc;
            for (std::uint64_t s = 0; s < count;) {
                Vec q{0.0, 0.0, 0.0};
                for (int a = 0; a < d; ++a) {
                    q[a] = R * (2.0 * u() - 1.0);
                }
                if (norm(q, d) > R) {
                    continue; // rejection keeps the draw uniform in the ball
                }
                acc.push(volume * integrand.evaluate(term, q, d));
                ++s;
            }
            partial[b] = acc;
        });
        Moments total;
        for (const auto& p : partial) {
            total.merge(p);
        }
        return {total.mean, std::sqrt(total.variance() / total.n), cfg.samples};
    }

    // Equal-volume radial shells with equal allocation.
    const std::uint64_t shells = static_cast<std::uint64_t>(std::max(1, cfg.shells));
    std::vector<Moments> partial(shells);
    parallel_for(shells, [&](std::size_t s) {
        Uniform u(stream_seed(cfg.seed, k, term, s));
        const std::uint64_t count = cfg.samples / shells + (s < cfg.samples % shells ? 1 : 0);
        Moments acc;
        for (std::uint64_t c = 0; c < count; ++c) {
            const double frac = (static_cast<double>(s) + u()) / static_cast<double>(shells);
            const double r = R * std::pow(frac, 1.0 / d);
            Vec q = random_direction(u, d);
            for (int a = 0; a < d; ++a) {
                q[a] *= r;
            }
            acc.push(integrand.evaluate(term, q, d));
        }
        partial[s] = acc;
    });
    double mean = 0.0;
    double var = 0.0;
    const double shell_volume = volume / static_cast<double>(shells);
    for (const auto& p : partial) {
        if (p.n == 0.0) {
            continue;
        }
        mean += shell_volume * p.mean;
        var += shell_volume * shell_volume * p.variance() / p.n;
    }
    return {mean, std::sqrt(var), cfg.samples};
}

McEstimate sum_estimates(std::initializer_list<McEstimate> parts)
{
    McEstimate out;
    double var = 0.0;
    for (const auto& p : parts) {
        out.mean += p.mean;
        var += p.std_error * p.std_error;
        out.samples_used += p.samples_used;
    }
    out.std_error = std::sqrt(var);
    return out;
}

} // namespace

McEstimate mc_gain(const RadialSpectrum& f, double k, const McConfig& cfg, const Physics& phys)
{
    return sum_estimates({estimate_term(f, k, cfg, phys, Term::gain_first),
                          estimate_term(f, k, cfg, phys, Term::gain_second)});
}

McEstimate mc_loss_frequency(const RadialSpectrum& f, double k, const McConfig& cfg,
                             const Physics& phys)
{
    return sum_estimates({estimate_term(f, k, cfg, phys, Term::loss_first),
                          estimate_term(f, k, cfg, phys, Term::loss_second)});
}

McEstimate mc_collision(const RadialSpectrum& f, double k, const McConfig& cfg, const Physics& phys)
{
    return sum_estimates({estimate_term(f, k, cfg, phys, Term::collision_first),
                          estimate_term(f, k, cfg, phys, Term::collision_second),
                          estimate_term(f, k, cfg, phys, Term::collision_third)});
}

} // namespace broadkin
