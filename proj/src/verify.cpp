#include "broadkin/verify.hpp"

#include "broadkin/integrator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace broadkin {

namespace {

std::uint64_t mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream ids keep the checks independent of each other under one seed.
enum : std::uint64_t {
    stream_weak = 1,
    stream_identity = 2,
    stream_gain = 3,
    stream_loss = 4,
    stream_holder = 5,
    stream_bracket = 6,
    stream_mc = 7,
};

std::uint64_t trial_stream(std::uint64_t check, std::uint64_t trial)
{
    return (check << 32) ^ trial;
}

std::vector<double> omega_power(const TriadQuadrature& quad, const DispersionParams& disp, double m)
{
    return sample_on_nodes(quad, [&](double k) { return std::pow(omega(k, disp), m); });
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

} // namespace

VerifyContext VerifyContext::make(const Physics& phys, GridPtr grid, const QuadratureOptions& options)
{
    TriadQuadrature quad = build_quadrature(*grid, phys.params.dimension_d, options);
    return VerifyContext{phys, std::move(grid), std::move(quad)};
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL)) {}

std::uint64_t Rng::next()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

double Rng::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

RadialSpectrum random_spectrum(const VerifyContext& ctx, const SpectrumFamily& family, Rng& rng)
{
    return random_spectrum(ctx.grid, ctx.phys, family, rng);
}

RadialSpectrum random_spectrum(const GridPtr& grid, const Physics& phys, const SpectrumFamily& family,
                               Rng& rng)
{
    struct Bump {
        double log_center, width, amplitude;
    };
    const int count = 1 + static_cast<int>(rng.next() % 4);
    std::vector<Bump> bumps;
    for (int b = 0; b < count; ++b) {
        bumps.push_back({rng.uniform(std::log(family.center_min), std::log(family.center_max)),
                         rng.uniform(family.width_min, family.width_max), rng.uniform(0.2, 1.0)});
    }
    const double u = rng.uniform(0.1, 1.0);
    RadialSpectrum f = RadialSpectrum::sample(grid, [&](double k) {
        if (k <= 0.0) {
            return 0.0;
        }
        double v = 0.0;
        for (const auto& b : bumps) {
            const double z = (std::log(k) - b.log_center) / b.width;
            v += b.amplitude * std::exp(-0.5 * z * z);
        }
        return v;
    });
    const int d = phys.params.dimension_d;
    const double size = std::max(moment(f, 0.0, phys.disp, d), moment(f, family.order, phys.disp, d));
    if (size == 0.0) {
        return f;
    }
    const double scale = family.radius * u / size;
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) {
        x *= scale;
    }
    return RadialSpectrum(grid, std::move(v));
}

CheckReport check_weak_formulation(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                                   double m, const SpectrumFamily& family)
{
    CheckReport r{"weak_formulation", trials, 0.0, identity_tolerance, true, seed, 0, {}};
    const std::vector<std::vector<double>> phis = {
        omega_power(ctx.quad, ctx.phys.disp, 0.0),
        omega_power(ctx.quad, ctx.phys.disp, 1.0),
        omega_power(ctx.quad, ctx.phys.disp, m),
    };
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, trial_stream(stream_weak, t));
        const RadialSpectrum f = random_spectrum(ctx, family, rng);
        const CollisionOutput c = collision(f, ctx.quad, ctx.phys);
        for (const auto& phi : phis) {
            const double strong = integrate_nodes(c.total, phi, ctx.quad);
            const double weak = weak_form_apply(f, phi, ctx.quad, ctx.phys);
            r.worst_ratio = std::max(r.worst_ratio, std::abs(strong - weak) / (1.0 + std::abs(strong)));
        }
    }
    r.passed = r.worst_ratio <= r.bound_used;
    r.detail = "phi in {1; omega; omega^" + fmt(m) + "}";
    return r;
}

CheckReport check_gain_loss_identity(const VerifyContext& ctx, std::size_t trials,
                                     std::uint64_t seed, const SpectrumFamily& family)
{
    CheckReport r{"gain_loss_identity", trials, 0.0, identity_tolerance, true, seed, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, trial_stream(stream_identity, t));
        const RadialSpectrum f = random_spectrum(ctx, family, rng);
        const CollisionOutput c = collision(f, ctx.quad, ctx.phys);
        const std::vector<double> direct = collision_direct(f, ctx.quad, ctx.phys);
        // the k = 0 node carries the values of its neighbour, f included
        const std::size_t src = ctx.quad.zero_node_source();
        for (std::size_t i = 0; i < direct.size(); ++i) {
            const std::size_t fi_at = (i == 0 && src < direct.size()) ? src : i;
            const double fi = fi_at < f.size() ? f[fi_at] : 0.0;
            const double split = c.gain[i] - fi * c.loss_frequency[i];
            const double scale = std::abs(c.gain[i]) + fi * c.loss_frequency[i];
            if (scale == 0.0) {
                if (direct[i] != 0.0) {
                    r.worst_ratio = std::numeric_limits<double>::infinity();
                }
                continue;
            }
            r.worst_ratio = std::max(r.worst_ratio, std::abs(split - direct[i]) / scale);
        }
    }
    r.passed = r.worst_ratio <= r.bound_used;
    r.detail = "nodewise |split - direct| / (gain + f theta)";
    return r;
}

CheckReport check_gain_bound(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                             double m, const SpectrumFamily& family)
{
    const int d = ctx.phys.params.dimension_d;
    CheckReport r{"gain_bound_m" + std::to_string(static_cast<int>(m)), trials, 0.0, 0.0, true, seed, 0, {}};
    SpectrumFamily fam = family;
    fam.order = m + 2.0;
    const double K0 = gain_constant_bilinear(ctx.phys, m);
    r.bound_used = K0 * fam.radius;
    const std::vector<double> phi = omega_power(ctx.quad, ctx.phys.disp, m);
    double worst_bilinear = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, trial_stream(stream_gain, t) ^ (static_cast<std::uint64_t>(m * 16) << 48));
        const RadialSpectrum f = random_spectrum(ctx, fam, rng);
        const double top = moment(f, m + 2.0, ctx.phys.disp, d);
        if (top == 0.0) {
            ++r.skipped;
            continue;
        }
        const double lhs = integrate_nodes(gain(f, ctx.quad, ctx.phys), phi, ctx.quad);
        r.worst_ratio = std::max(r.worst_ratio, lhs / top);
        worst_bilinear = std::max(worst_bilinear, lhs / (top * moment(f, 0.0, ctx.phys.disp, d)));
    }
    r.passed = r.worst_ratio <= r.bound_used;
    r.detail = "K0=" + fmt(K0) + " radius=" + fmt(fam.radius) + " worst bilinear ratio=" + fmt(worst_bilinear);
    return r;
}

CheckReport check_loss_bound(const VerifyContext& ctx, std::size_t trials, std::uint64_t seed,
                             const SpectrumFamily& family)
{
    CheckReport r{"loss_bound", trials, 0.0, 1.0, true, seed, 0, {}};
    const auto nodes = ctx.quad.nodes().nodes();
    const std::size_t zero = ctx.quad.zero_node_source() < ctx.quad.node_count() ? 0 : nodes.size();
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, trial_stream(stream_loss, t));
        const RadialSpectrum f = random_spectrum(ctx, family, rng);
        const LossConstants a = derive_loss_constants(f, ctx.phys);
        const std::vector<double> theta = loss_frequency(f, ctx.quad, ctx.phys);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (i == zero) {
                continue; // copied from the first positive node, not a quadrature value
            }
            const double bound = a.A1 * nodes[i] * nodes[i] + a.A2;
            if (bound > 0.0) {
                r.worst_ratio = std::max(r.worst_ratio, theta[i] / bound);
            } else if (theta[i] > 0.0) {
                r.worst_ratio = std::numeric_limits<double>::infinity();
            }
        }
    }
    r.passed = r.worst_ratio <= r.bound_used;
    r.detail = "max_k theta / (A1 k^2 + A2)";
    return r;
}

HolderResult check_holder(const VerifyContext& ctx, std::size_t pairs, std::uint64_t seed, double m,
                          int decades, double slope_limit, const SpectrumFamily& family)
{
    const int d = ctx.phys.params.dimension_d;
    HolderResult out;
    out.report = {"holder_half", pairs * static_cast<std::size_t>(decades), 0.0, slope_limit, true, seed, 0, {}};
    SpectrumFamily fam = family;
    fam.order = m + 2.0;
    fam.radius = 0.5 * family.radius; // g and g + s delta both stay in the ball
    const std::vector<double> phi = omega_power(ctx.quad, ctx.phys.disp, m);
    out.distances.assign(decades, 0.0);
    out.max_ratio.assign(decades, 0.0);
    std::vector<double> diff(ctx.quad.node_count());
    for (std::size_t p = 0; p < pairs; ++p) {
        Rng rng(seed, trial_stream(stream_holder, p));
        const RadialSpectrum g = random_spectrum(ctx, fam, rng);
        const RadialSpectrum raw = random_spectrum(ctx, fam, rng);
        const double raw_norm = moment(raw, m + 2.0, ctx.phys.disp, d);
        if (raw_norm == 0.0) {
            out.report.skipped += decades;
            continue;
        }
        const CollisionOutput cg = collision(g, ctx.quad, ctx.phys);
        for (int j = 0; j < decades; ++j) {
            const double s = std::pow(10.0, -(decades - 1) + j);
            std::vector<double> hv(g.size());
            for (std::size_t i = 0; i < hv.size(); ++i) {
                hv[i] = g[i] + s * raw[i] / raw_norm;
            }
            const RadialSpectrum h(ctx.grid, std::move(hv));
            const double dist = weighted_distance(g, h, m + 2.0, ctx.phys.disp, d);
            if (dist == 0.0) {
                ++out.report.skipped; // degenerate pair
                continue;
            }
            const CollisionOutput ch = collision(h, ctx.quad, ctx.phys);
            for (std::size_t i = 0; i < diff.size(); ++i) {
                diff[i] = std::abs(cg.total[i] - ch.total[i]);
            }
            const double ratio = integrate_nodes(diff, phi, ctx.quad) / std::sqrt(dist);
            out.distances[j] = s;
            out.max_ratio[j] = std::max(out.max_ratio[j], ratio);
            out.ratio_sup = std::max(out.ratio_sup, ratio);
        }
    }
    std::vector<double> x, y;
    for (int j = 0; j < decades; ++j) {
        if (out.max_ratio[j] > 0.0) {
            x.push_back(std::log10(out.distances[j]));
            y.push_back(std::log10(out.max_ratio[j]));
        }
    }
    if (x.size() >= 2) {
        out.slope_vs_distance = fit_slope(x, y);
        out.slope_toward_zero = -out.slope_vs_distance;
    }
    out.report.worst_ratio = out.slope_toward_zero;
    out.report.passed = out.slope_toward_zero <= slope_limit && std::isfinite(out.ratio_sup);
    out.report.detail = "slope vs log(1/dist)=" + fmt(out.slope_toward_zero) +
                        " slope vs log(dist)=" + fmt(out.slope_vs_distance) +
                        " ratio sup=" + fmt(out.ratio_sup);
    return out;
}

CheckReport check_lipschitz_bracket(const VerifyContext& ctx, std::size_t trials,
                                    std::uint64_t seed, double m, const SpectrumFamily& family)
{
    const int d = ctx.phys.params.dimension_d;
    CheckReport r{"lipschitz_bracket", trials, 0.0, 1.0, true, seed, 0, {}};
    const RadialGrid& grid = *ctx.grid;
    double L_emp = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, trial_stream(stream_bracket, t));
        const RadialSpectrum f = random_spectrum(ctx, family, rng);
        const RadialSpectrum g = random_spectrum(ctx, family, rng);
        const std::vector<double> delta = axpby(1.0, f, -1.0, g);
        const double dist = signed_norm(delta, m, grid, ctx.phys.disp, d);
        if (dist == 0.0) {
            ++r.skipped;
            continue;
        }
        const std::vector<double> qf = rhs(f, ctx.quad, ctx.phys);
        const std::vector<double> qg = rhs(g, ctx.quad, ctx.phys);
        const CollisionOutput cf = collision(f, ctx.quad, ctx.phys);
        const CollisionOutput cg = collision(g, ctx.quad, ctx.phys);
        std::vector<double> dq(grid.size()), dc(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            dq[i] = qf[i] - qg[i];
            dc[i] = cf.total[i] - cg.total[i];
        }
        const double br = bracket(dq, delta, m, grid, ctx.phys.disp, d);
        const double two_sided = signed_norm(dc, m, grid, ctx.phys.disp, d);
        L_emp = std::max(L_emp, br / dist);
        // br <= two_sided; report the normalised excess
        const double ratio = two_sided > 0.0 ? br / two_sided : (br > 0.0 ? 2.0 : 0.0);
        r.worst_ratio = std::max(r.worst_ratio, ratio);
    }
    r.passed = r.worst_ratio <= r.bound_used * (1.0 + 1e-12);
    r.detail = "bracket / ||dC||_m; empirical one-sided L=" + fmt(L_emp);
    return r;
}

DeltaLimitResult check_delta_limit(const std::vector<double>& gammas, double final_limit)
{
    using boost::math::quadrature::gauss_kronrod;
    DeltaLimitResult out;
    out.report = {"delta_limit", gammas.size(), 0.0, final_limit, true, 0, 0, {}};
    const double pi = std::numbers::pi;
    for (double G : gammas) {
        // L(D, G) dD = dt under D = G tan(t)
        auto integrand = [G](double t) {
            const double D = G * std::tan(t);
            return std::exp(-0.5 * D * D);
        };
        const double I = 2.0 * gauss_kronrod<double, 61>::integrate(integrand, 0.0, 0.5 * pi, 20, 1e-14);
        out.gammas.push_back(G);
        out.errors.push_back(std::abs(I - pi));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < out.errors.size(); ++i) {
        decreasing = decreasing && out.errors[i] < out.errors[i - 1];
    }
    out.report.worst_ratio = out.errors.empty() ? 0.0 : out.errors.back();
    out.report.passed = decreasing && out.report.worst_ratio < final_limit;
    std::string d = decreasing ? "strictly decreasing;" : "NOT decreasing;";
    for (std::size_t i = 0; i < out.errors.size(); ++i) {
        d += " " + fmt(out.gammas[i]) + ":" + fmt(out.errors[i]);
    }
    out.report.detail = d;
    return out;
}

McCrossResult check_mc_oracle(const VerifyContext& ctx, std::uint64_t seed,
                              const McCrossOptions& options, const SpectrumFamily& family)
{
    McCrossResult out;
    out.report = {"mc_oracle", options.spectra * options.nodes * 3, 0.0, options.se_limit, true, seed, 0, {}};
    const RadialGrid& grid = *ctx.grid;
    std::size_t se_fail = 0, rel_fail = 0;
    double worst_rel = 0.0;
    for (std::size_t s = 0; s < options.spectra; ++s) {
        Rng rng(seed, trial_stream(stream_mc, s));
        const RadialSpectrum f = random_spectrum(ctx, family, rng);
        const CollisionOutput c = collision(f, ctx.quad, ctx.phys);
        auto nodal_max = [&](const std::vector<double>& v) {
            double mx = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                mx = std::max(mx, std::abs(v[i]));
            }
            return mx;
        };
        const double max_total = nodal_max(c.total);
        const double max_gain = nodal_max(c.gain);
        const double max_loss = nodal_max(c.loss_frequency);
        McConfig mc;
        mc.samples = options.samples;
        mc.dimension = ctx.phys.params.dimension_d;
        for (std::size_t j = 0; j < options.nodes; ++j) {
            const std::size_t i = (j + 1) * (grid.size() - 1) / (options.nodes + 1);
            const double k = grid[i];
            mc.seed = mix(seed ^ mix(s * 1000 + j));
            const McComparison base{s, "", k, 0.0, {}, 0.0, false, false};
            std::vector<McComparison> rows(3, base);
            rows[0].term = "collision";
            rows[0].deterministic = c.total[i];
            rows[0].mc = mc_collision(f, k, mc, ctx.phys);
            rows[0].nodal_max = max_total;
            rows[1].term = "gain";
            rows[1].deterministic = c.gain[i];
            rows[1].mc = mc_gain(f, k, mc, ctx.phys);
            rows[1].nodal_max = max_gain;
            rows[2].term = "loss_frequency";
            rows[2].deterministic = c.loss_frequency[i];
            rows[2].mc = mc_loss_frequency(f, k, mc, ctx.phys);
            rows[2].nodal_max = max_loss;
            for (auto& row : rows) {
                const double diff = std::abs(row.deterministic - row.mc.mean);
                const double z = row.mc.std_error > 0.0 ? diff / row.mc.std_error
                                                         : (diff > 1e-12 * row.nodal_max ? 1e300 : 0.0);
                row.within_se = z <= options.se_limit;
                row.within_rel = true;
                if (std::abs(row.deterministic) > options.rel_floor * row.nodal_max) {
                    const double rel = diff / std::abs(row.deterministic);
                    worst_rel = std::max(worst_rel, rel);
                    row.within_rel = rel <= options.rel_limit;
                }
                out.report.worst_ratio = std::max(out.report.worst_ratio, z);
                se_fail += row.within_se ? 0 : 1;
                rel_fail += row.within_rel ? 0 : 1;
                out.rows.push_back(row);
            }
        }
    }
    out.report.passed = se_fail == 0 && rel_fail == 0;
    out.report.detail = "worst |det-mc|/se=" + fmt(out.report.worst_ratio) + " worst rel=" + fmt(worst_rel) +
                        " se failures=" + std::to_string(se_fail) + " rel failures=" + std::to_string(rel_fail);
    return out;
}

void write_reports_csv(std::ostream& out, const std::vector<CheckReport>& reports)
{
    out << "check,trials,worst_ratio,bound_used,passed,seed,skipped,detail\n";
    for (const auto& r : reports) {
        out << r.check_name << ',' << r.trials << ',' << fmt(r.worst_ratio) << ',' << fmt(r.bound_used) << ','
            << (r.passed ? "true" : "false") << ',' << r.seed << ',' << r.skipped << ',' << r.detail << '\n';
    }
}

void write_mc_csv(std::ostream& out, const std::vector<McComparison>& rows)
{
    out << "spectrum,term,k,deterministic,mc_mean,mc_stderr,within_se,within_rel\n";
    for (const auto& r : rows) {
        out << r.spectrum << ',' << r.term << ',' << fmt(r.k) << ',' << fmt(r.deterministic) << ','
            << fmt(r.mc.mean) << ',' << fmt(r.mc.std_error) << ',' << (r.within_se ? 1 : 0) << ','
            << (r.within_rel ? 1 : 0) << '\n';
    }
}

bool SuiteResult::passed() const
{
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed; });
}

SuiteResult run_suite(const VerifyContext& ctx, const SuiteOptions& o)
{
    SpectrumFamily family;
    family.order = o.order + 2.0;
    family.radius = o.family_radius;
    SuiteResult out;
    out.reports.push_back(check_weak_formulation(ctx, o.trials, o.seed, o.order, family));
    out.reports.push_back(check_gain_loss_identity(ctx, o.trials, o.seed, family));
    out.reports.push_back(check_gain_bound(ctx, o.gain_trials, o.seed, 0.0, family));
    out.reports.push_back(check_gain_bound(ctx, o.gain_trials, o.seed, o.order, family));
    out.reports.push_back(check_loss_bound(ctx, o.trials, o.seed, family));
    out.reports.push_back(
        check_holder(ctx, o.holder_pairs, o.seed, o.order, o.holder_decades, o.holder_slope_limit, family).report);
    out.reports.push_back(check_lipschitz_bracket(ctx, o.trials, o.seed, o.order, family));
    out.reports.push_back(check_delta_limit(o.delta_gammas).report);
    McCrossResult mc = check_mc_oracle(ctx, o.seed, o.mc, family);
    out.reports.push_back(mc.report);
    out.mc_rows = std::move(mc.rows);
    return out;
}

} // namespace broadkin
