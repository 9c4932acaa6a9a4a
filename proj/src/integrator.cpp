#include "broadkin/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace broadkin {

namespace {

void require_default_model(const Physics& phys, const char* what)
{
    if (!phys.model.is_default()) {
        throw UnsupportedModelError(std::string(what) +
                                    " is only proven for the ocean broadening with the sum kernel");
    }
}

double kernel_over_floor(const Physics& phys)
{
    const auto& p = phys.params;
    return p.kernel_constant_C * p.kernel_constant_C / (p.broadening_c1 * p.broadening_floor_c2);
}

double gain_order_for(const ConstantsOptions& options)
{
    double order = options.working_order + 3.0;
    for (double m : options.monitored_orders) {
        order = std::max(order, m);
    }
    return order;
}

// Smallest lambda >= e^T with lambda = exp(Ctilde(K0 lambda M0) T), by
// monotone iteration. False when the iteration runs away.
bool close_mass_bound(double M0, double K0, const Physics& phys, double T, double& lambda,
                      GronwallConstants& g)
{
    lambda = std::exp(T);
    for (int iter = 0; iter < 400; ++iter) {
        g = derive_gronwall(phys, K0 * lambda * M0);
        const double needed = g.Ctilde * T;
        if (!(needed <= 700.0)) {
            return false;
        }
        const double required = std::exp(needed);
        if (required <= lambda) {
            return true;
        }
        lambda = required * (1.0 + 1e-12);
    }
    return false;
}

} // namespace

double doubling_factor(double m)
{
    if (m < 0.0) {
        throw DomainError("doubling factor needs m >= 0");
    }
    // (2a + 2b)^m <= 2^m max(1, 2^{m-1}) (a^m + b^m)
    return std::pow(2.0, m) * std::max(1.0, std::pow(2.0, m - 1.0));
}

double gain_constant_bilinear(const Physics& phys, double m)
{
    require_default_model(phys, "the gain-moment constant");
    const double Q = kernel_over_floor(phys);
    return 12.0 * Q * (3.0 * doubling_factor(m) + 1.0) / phys.disp.lambda2;
}

double derive_gain_constant(const Physics& phys, double m, double mass_bound)
{
    return gain_constant_bilinear(phys, m) * mass_bound;
}

GronwallConstants derive_gronwall(const Physics& phys, double K)
{
    const double gamma = phys.params.damping_exponent_gamma;
    const double nu = phys.params.viscosity_nu;
    if (!(gamma > 2.0)) {
        throw DomainError("Gronwall constant needs gamma > 2");
    }
    const double L1 = phys.disp.lambda1;
    const double L2 = phys.disp.lambda2;
    GronwallConstants out;
    if (K * L2 == 0.0) {
        out.C_hat = K * L1;
    } else {
        if (!(nu > 0.0)) {
            throw DomainError("Gronwall constant needs nu > 0 when the gain constant is positive");
        }
        // d/dk: 2 K L2 k = 2 nu gamma k^{gamma-1}
        const double k_star = std::pow(K * L2 / (nu * gamma), 1.0 / (gamma - 2.0));
        out.C_hat = K * (L1 + L2 * k_star * k_star) - 2.0 * nu * std::pow(k_star, gamma);
    }
    out.Ctilde = std::max(2.0 * out.C_hat, 1.0);
    out.theta_star = out.Ctilde;
    return out;
}

double certified_mass_limit(const Physics& phys, double T, const ConstantsOptions& options)
{
    const double K0 = gain_constant_bilinear(phys, gain_order_for(options));
    double lambda = 0.0;
    GronwallConstants g;
    double lo = 0.0;
    double hi = 1.0;
    while (close_mass_bound(hi, K0, phys, T, lambda, g)) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (close_mass_bound(mid, K0, phys, T, lambda, g) ? lo : hi) = mid;
    }
    return lo;
}

LossConstants derive_loss_constants(const RadialSpectrum& f0, const Physics& phys)
{
    require_default_model(phys, "the loss-frequency bound");
    const int d = phys.params.dimension_d;
    const double M0 = moment(f0, 0.0, phys.disp, d);
    const double M2 = moment(f0, 2.0, phys.disp, d);
    const double c = 32.0 / 3.0 * kernel_over_floor(phys);
    LossConstants out{c * M0, c * M2 / phys.disp.lambda2};
    if (!std::isfinite(out.A1) || !std::isfinite(out.A2)) {
        throw OverflowError("loss-bound constants are not finite");
    }
    return out;
}

double step_size_bound(double R, const AnalyticConstants& consts, double T,
                       const PhysicalParams& params)
{
    const double growth = std::exp(consts.gronwall_Ctilde * T);
    const double rate = (consts.loss_A1 * R * R + consts.loss_A2) * growth + damping(R, params);
    if (rate == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / (2.0 * rate);
}

AnalyticConstants derive_constants(const RadialSpectrum& f0, const Physics& phys, double T,
                                   const ConstantsOptions& options)
{
    require_default_model(phys, "certified integration");
    if (!(T > 0.0)) {
        throw PreconditionError("horizon T must be > 0");
    }
    const int d = phys.params.dimension_d;
    AnalyticConstants c;
    c.horizon_T = T;
    c.gain_order = gain_order_for(options);
    c.gain_bilinear = gain_constant_bilinear(phys, c.gain_order);

    const double M0 = moment(f0, 0.0, phys.disp, d);
    double lambda = 0.0;
    GronwallConstants g;
    if (!close_mass_bound(M0, c.gain_bilinear, phys, T, lambda, g)) {
        std::ostringstream msg;
        msg << "initial spectrum too large for certified constants (M_0 = " << M0
            << ", limit " << certified_mass_limit(phys, T, options)
            << "); the mass-bound fixed point does not close";
        throw PreconditionError(msg.str());
    }
    c.mass_bound = lambda * M0;
    c.gain_constant_K = c.gain_bilinear * c.mass_bound;
    c.C_hat = g.C_hat;
    c.gronwall_Ctilde = g.Ctilde;
    c.theta_star = g.theta_star;

    const LossConstants loss = derive_loss_constants(f0, phys);
    c.loss_A1 = loss.A1;
    c.loss_A2 = loss.A2;
    c.varsigma = std::max(moment(f0, options.working_order + 3.0, phys.disp, d), 1.0 + 1e-6);
    return c;
}

std::vector<double> rhs(const RadialSpectrum& f, const TriadQuadrature& quad, const Physics& phys)
{
    const CollisionOutput c = collision(f, quad, phys);
    const auto nodes = f.grid().nodes();
    std::vector<double> q(f.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = c.total[i] - damping(nodes[i], phys.params) * f[i];
    }
    return q;
}

RadialSpectrum euler_step(const RadialSpectrum& f, double h, double R, const TriadQuadrature& quad,
                          const AnalyticConstants& consts, const Physics& phys)
{
    const double bound = step_size_bound(R, consts, consts.horizon_T, phys.params);
    if (!(h > 0.0) || !(h < bound)) {
        std::ostringstream msg;
        msg << "euler_step: step h = " << h << " must satisfy 0 < h < h_R/2 = " << bound;
        throw PreconditionError(msg.str());
    }
    const RadialSpectrum fR = truncate(f, R);
    const std::vector<double> q = rhs(fR, quad, phys);
    std::vector<double> w(f.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = f[i] + h * q[i];
        if (w[i] < 0.0) {
            std::ostringstream msg;
            msg << "euler_step produced a negative value " << w[i] << " at node " << i
                << " under an admissible step; the loss bound does not hold";
            throw std::logic_error(msg.str());
        }
    }
    return RadialSpectrum(f.grid_ptr(), std::move(w));
}

namespace {

RadialSpectrum heun_step(const RadialSpectrum& f, double h, double R, const TriadQuadrature& quad,
                         const Physics& phys, std::size_t& clamps)
{
    const std::vector<double> q0 = rhs(truncate(f, R), quad, phys);
    std::vector<double> pred(f.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = f[i] + h * q0[i];
        if (pred[i] < 0.0) {
            pred[i] = 0.0;
            ++clamps;
        }
    }
    const RadialSpectrum mid(f.grid_ptr(), std::move(pred));
    const std::vector<double> q1 = rhs(truncate(mid, R), quad, phys);
    std::vector<double> w(f.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = f[i] + 0.5 * h * (q0[i] + q1[i]);
        if (w[i] < 0.0) {
            w[i] = 0.0;
            ++clamps;
        }
    }
    return RadialSpectrum(f.grid_ptr(), std::move(w));
}

std::string describe(const StepRecord& r)
{
    std::ostringstream s;
    s << "t=" << r.time << " dt=" << r.dt << " min_f=" << r.min_value
      << " gronwall_margin=" << r.gronwall_margin << " omega_margin=" << r.omega_set_margin
      << " mass_margin=" << r.mass_margin << " subtangent_ratio=" << r.subtangent_ratio;
    return s.str();
}

} // namespace

Trajectory evolve(const RadialSpectrum& f0, double T, const TriadQuadrature& quad,
                  const Physics& phys, const EvolveConfig& cfg)
{
    const int d = phys.params.dimension_d;
    const double m = cfg.constants.working_order;
    const double R = cfg.truncation_R.value_or(f0.grid().back());
    if (!(R > 0.0)) {
        throw PreconditionError("truncation radius must be > 0");
    }

    Trajectory traj;
    traj.constants = derive_constants(f0, phys, T, cfg.constants);
    const AnalyticConstants& c = traj.constants;

    const double norm0 = moment(f0, m + 3.0, phys.disp, d);
    if (norm0 > c.varsigma) {
        throw PreconditionError("initial spectrum lies outside the ball B_*(O, varsigma)");
    }

    const double bound = step_size_bound(R, c, T, phys.params);
    const double h = cfg.dt.value_or(0.5 * bound);
    if (!(h > 0.0) || !(h < bound)) {
        std::ostringstream msg;
        msg << "time step dt = " << h << " must satisfy 0 < dt < h_R/2 = " << bound;
        throw PreconditionError(msg.str());
    }
    traj.step = h;

    const auto& orders = cfg.constants.monitored_orders;
    const MomentVector initial = moments(f0, orders, phys.disp, d);
    const double tol = cfg.tolerance;

    auto make_record = [&](const RadialSpectrum& f, double t, double dt, double subtangent,
                           std::size_t clamps) {
        StepRecord r;
        r.time = t;
        r.dt = dt;
        r.truncation_R = R;
        r.min_value = f.min_value();
        r.moments = moments(f, orders, phys.disp, d);
        r.gronwall_margin = std::numeric_limits<double>::infinity();
        const double growth = std::exp(c.gronwall_Ctilde * t);
        for (std::size_t o = 0; o < orders.size(); ++o) {
            const double env = growth * initial.values[o];
            r.gronwall_envelopes.push_back(env);
            const double rel = env > 0.0 ? (env - r.moments.values[o]) / env
                                         : (r.moments.values[o] > 0.0 ? -1.0 : 0.0);
            r.gronwall_margin = std::min(r.gronwall_margin, rel);
        }
        if (orders.empty()) {
            r.gronwall_margin = 0.0;
        }
        r.omega_set_norm = moment(f, m + 3.0, phys.disp, d);
        r.omega_set_margin = (2.0 * c.varsigma + 1.0) * std::exp(c.theta_star * t) - r.omega_set_norm;
        r.mass_margin = c.mass_bound - moment(f, 0.0, phys.disp, d);
        r.subtangent_ratio = subtangent;
        r.clamp_events = clamps;
        return r;
    };

    auto check = [&](const StepRecord& r) {
        std::string failure;
        if (r.min_value < 0.0) {
            failure = "positivity";
        } else if (r.gronwall_margin < -tol) {
            failure = "Gronwall envelope";
        } else if (!(r.omega_set_margin > 0.0)) {
            failure = "solution-set bound";
        } else if (r.mass_margin < -tol * c.mass_bound) {
            failure = "mass bound";
        } else if (cfg.stepper == Stepper::euler && r.subtangent_ratio > 0.5 * c.theta_star * (1.0 + tol)) {
            failure = "sub-tangent increment";
        }
        if (!failure.empty()) {
            throw IntegrationError("monitor '" + failure + "' failed: " + describe(r), r);
        }
    };

    RadialSpectrum f = f0;
    traj.snapshots.push_back({0.0, f});
    traj.records.push_back(make_record(f, 0.0, 0.0, 0.0, 0));
    check(traj.records.back());

    double t = 0.0;
    std::size_t step = 0;
    std::size_t clamps = 0;
    while (T - t > 1e-12 * T) {
        const double dt = std::min(h, T - t);
        RadialSpectrum next = cfg.stepper == Stepper::euler
                                  ? euler_step(f, dt, R, quad, c, phys)
                                  : heun_step(f, dt, R, quad, phys, clamps);
        const double norm_before = moment(f, m + 3.0, phys.disp, d);
        const double norm_after = moment(next, m + 3.0, phys.disp, d);
        const double subtangent = norm_before > 0.0 ? (norm_after - norm_before) / (dt * norm_before) : 0.0;
        f = std::move(next);
        t = (T - t - dt <= 1e-12 * T) ? T : t + dt;
        ++step;
        traj.records.push_back(make_record(f, t, dt, subtangent, clamps));
        check(traj.records.back());
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 && t < T) {
            traj.snapshots.push_back({t, f});
        }
    }
    traj.snapshots.push_back({t, f});
    return traj;
}

double bracket(std::span<const double> phi, std::span<const double> psi, double order,
               const RadialGrid& grid, const DispersionParams& disp, int d)
{
    if (phi.size() != grid.size() || psi.size() != grid.size()) {
        throw StructuralError("bracket: values do not match the grid");
    }
    const auto mu = grid.measure(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double s = psi[i] > 0.0 ? 1.0 : (psi[i] < 0.0 ? -1.0 : 0.0);
        acc += mu[i] * phi[i] * s * std::pow(omega(grid[i], disp), order);
    }
    return acc;
}

double signed_norm(std::span<const double> values, double order, const RadialGrid& grid,
                   const DispersionParams& disp, int d)
{
    if (values.size() != grid.size()) {
        throw StructuralError("signed_norm: values do not match the grid");
    }
    const auto mu = grid.measure(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += mu[i] * std::abs(values[i]) * std::pow(omega(grid[i], disp), order);
    }
    return acc;
}

} // namespace broadkin
