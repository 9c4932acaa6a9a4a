#include "broadkin/config.hpp"

#include "broadkin/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace broadkin {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Located {
    std::string source;
    int line;
    std::string key;

    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParseError(source + ":" + std::to_string(line) + ": key '" + key + "': " + why);
    }
};

double to_double(const std::string& v, const Located& at)
{
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
        at.fail("expected a finite number, got '" + v + "'");
    }
    return x;
}

std::uint64_t to_uint(const std::string& v, const Located& at)
{
    errno = 0;
    char* end = nullptr;
    if (v.empty() || v[0] == '-') {
        at.fail("expected a nonnegative integer, got '" + v + "'");
    }
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) {
        at.fail("expected a nonnegative integer, got '" + v + "'");
    }
    return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Located&)>;

template <class Get>
Setter number(Get get)
{
    return [get](RunConfig& c, const std::string& v, const Located& at) { get(c) = to_double(v, at); };
}

template <class Get>
Setter integer(Get get)
{
    return [get](RunConfig& c, const std::string& v, const Located& at) {
        get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(to_uint(v, at));
    };
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"physical.coriolis_F", number([](RunConfig& c) -> double& { return c.params.coriolis_F; })},
        {"physical.buoyancy_N", number([](RunConfig& c) -> double& { return c.params.buoyancy_N; })},
        {"physical.ref_vertical_wavenumber_m",
         number([](RunConfig& c) -> double& { return c.params.ref_vertical_wavenumber_m; })},
        {"physical.gravity_g", number([](RunConfig& c) -> double& { return c.params.gravity_g; })},
        {"physical.density_rho0", number([](RunConfig& c) -> double& { return c.params.density_rho0; })},
        {"physical.viscosity_nu", number([](RunConfig& c) -> double& { return c.params.viscosity_nu; })},
        {"physical.damping_exponent_gamma",
         number([](RunConfig& c) -> double& { return c.params.damping_exponent_gamma; })},
        {"physical.broadening_c1", number([](RunConfig& c) -> double& { return c.params.broadening_c1; })},
        {"physical.broadening_floor_c2",
         number([](RunConfig& c) -> double& { return c.params.broadening_floor_c2; })},
        {"physical.kernel_constant_C", number([](RunConfig& c) -> double& { return c.params.kernel_constant_C; })},
        {"physical.dimension_d", integer([](RunConfig& c) -> int& { return c.params.dimension_d; })},
        {"physical.lambda1", number([](RunConfig& c) -> std::optional<double>& { return c.lambda1; })},
        {"physical.lambda2", number([](RunConfig& c) -> std::optional<double>& { return c.lambda2; })},

        {"grid.n", integer([](RunConfig& c) -> std::size_t& { return c.grid.n; })},
        {"grid.k_min", number([](RunConfig& c) -> double& { return c.grid.k_min; })},
        {"grid.k_max", number([](RunConfig& c) -> double& { return c.grid.k_max; })},
        {"grid.spacing",
         [](RunConfig& c, const std::string& v, const Located& at) {
             if (v == "uniform") {
                 c.grid.spacing = Spacing::uniform;
             } else if (v == "log" || v == "logarithmic") {
                 c.grid.spacing = Spacing::logarithmic;
             } else {
                 at.fail("expected uniform or log, got '" + v + "'");
             }
         }},

        {"model.broadening_model",
         [](RunConfig& c, const std::string& v, const Located& at) {
             try {
                 c.model.broadening = parse_broadening_model(v);
             } catch (const Error& e) {
                 at.fail(e.what());
             }
         }},
        {"model.kernel_model",
         [](RunConfig& c, const std::string& v, const Located& at) {
             try {
                 c.model.kernel = parse_kernel_model(v);
             } catch (const Error& e) {
                 at.fail(e.what());
             }
         }},
        {"model.gamma_floor", number([](RunConfig& c) -> double& { return c.model.gamma_floor; })},

        {"initial.kind",
         [](RunConfig& c, const std::string& v, const Located& at) {
             static const char* kinds[] = {"zero", "gaussian", "lognormal", "random", "snapshot"};
             if (std::find(std::begin(kinds), std::end(kinds), v) == std::end(kinds)) {
                 at.fail("expected zero, gaussian, lognormal, random or snapshot, got '" + v + "'");
             }
             c.initial.kind = v;
         }},
        {"initial.amplitude", number([](RunConfig& c) -> double& { return c.initial.amplitude; })},
        {"initial.center", number([](RunConfig& c) -> double& { return c.initial.center; })},
        {"initial.width", number([](RunConfig& c) -> double& { return c.initial.width; })},
        {"initial.path", [](RunConfig& c, const std::string& v, const Located&) { c.initial.path = v; }},
        {"initial.mass", number([](RunConfig& c) -> std::optional<double>& { return c.initial.mass; })},
        {"initial.mass_fraction",
         number([](RunConfig& c) -> std::optional<double>& { return c.initial.mass_fraction; })},

        {"run.T", number([](RunConfig& c) -> double& { return c.run.T; })},
        {"run.dt", number([](RunConfig& c) -> std::optional<double>& { return c.run.dt; })},
        {"run.truncation_R",
         number([](RunConfig& c) -> std::optional<double>& { return c.run.truncation_R; })},
        {"run.working_order", number([](RunConfig& c) -> double& { return c.run.working_order; })},
        {"run.orders",
         [](RunConfig& c, const std::string& v, const Located& at) {
             try {
                 c.run.orders = parse_orders(v);
             } catch (const Error& e) {
                 at.fail(e.what());
             }
         }},
        {"run.stepper",
         [](RunConfig& c, const std::string& v, const Located& at) {
             if (v == "euler") {
                 c.run.stepper = Stepper::euler;
             } else if (v == "heun") {
                 c.run.stepper = Stepper::heun;
             } else {
                 at.fail("expected euler or heun, got '" + v + "'");
             }
         }},
        {"run.snapshot_every", integer([](RunConfig& c) -> std::size_t& { return c.run.snapshot_every; })},
        {"run.tolerance", number([](RunConfig& c) -> double& { return c.run.tolerance; })},
        {"run.output_dir", [](RunConfig& c, const std::string& v, const Located&) { c.run.output_dir = v; }},
        {"run.seed", integer([](RunConfig& c) -> std::uint64_t& { return c.seed; })},

        {"verify.trials", integer([](RunConfig& c) -> std::size_t& { return c.verify.suite.trials; })},
        {"verify.seed", integer([](RunConfig& c) -> std::uint64_t& { return c.verify.suite.seed; })},
        {"verify.order", number([](RunConfig& c) -> double& { return c.verify.suite.order; })},
        {"verify.family_radius", number([](RunConfig& c) -> double& { return c.verify.suite.family_radius; })},
        {"verify.gain_trials", integer([](RunConfig& c) -> std::size_t& { return c.verify.suite.gain_trials; })},
        {"verify.holder_pairs", integer([](RunConfig& c) -> std::size_t& { return c.verify.suite.holder_pairs; })},
        {"verify.holder_decades", integer([](RunConfig& c) -> int& { return c.verify.suite.holder_decades; })},
        {"verify.holder_slope_limit",
         number([](RunConfig& c) -> double& { return c.verify.suite.holder_slope_limit; })},
        {"verify.delta_gammas",
         [](RunConfig& c, const std::string& v, const Located& at) {
             try {
                 c.verify.suite.delta_gammas = parse_orders(v);
             } catch (const Error& e) {
                 at.fail(e.what());
             }
         }},
        {"verify.mc_samples", integer([](RunConfig& c) -> std::uint64_t& { return c.verify.suite.mc.samples; })},
        {"verify.mc_spectra", integer([](RunConfig& c) -> std::size_t& { return c.verify.suite.mc.spectra; })},
        {"verify.mc_nodes", integer([](RunConfig& c) -> std::size_t& { return c.verify.suite.mc.nodes; })},
        {"verify.mc_se_limit", number([](RunConfig& c) -> double& { return c.verify.suite.mc.se_limit; })},
        {"verify.mc_rel_limit", number([](RunConfig& c) -> double& { return c.verify.suite.mc.rel_limit; })},
        {"verify.weight_scale", number([](RunConfig& c) -> double& { return c.verify.weight_scale; })},
        {"verify.output_dir", [](RunConfig& c, const std::string& v, const Located&) { c.verify.output_dir = v; }},
    };
    return table;
}

} // namespace

std::vector<double> parse_orders(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(x)) {
            throw ParseError("malformed number list entry '" + item + "' in '" + text + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) {
        throw ParseError("empty number list");
    }
    return out;
}

RunConfig parse_config(std::istream& in, const std::string& source)
{
    RunConfig cfg;
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ParseError(source + ":" + std::to_string(line) + ": unterminated section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            static const char* known[] = {"physical", "grid", "model", "initial", "run", "verify"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                throw ParseError(source + ":" + std::to_string(line) + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source + ":" + std::to_string(line) + ": expected 'key = value', got '" + text + "'");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const Located at{source, line, full};
        if (section.empty()) {
            at.fail("key outside any section");
        }
        const auto it = setters().find(full);
        if (it == setters().end()) {
            at.fail("unknown key");
        }
        it->second(cfg, value, at);
        cfg.echo.emplace_back(full, value);
    }
    if (!(cfg.run.T > 0.0)) {
        throw ParseError(source + ": run.T must be > 0");
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    return parse_config(in, path);
}

Physics make_physics(const RunConfig& cfg)
{
    PhysicalParams p = cfg.params;
    if (cfg.lambda1) {
        if (*cfg.lambda1 < 0.0) {
            throw PreconditionError("lambda1 must be >= 0");
        }
        p.coriolis_F = std::sqrt(*cfg.lambda1);
    }
    if (cfg.lambda2) {
        if (!(*cfg.lambda2 > 0.0)) {
            throw PreconditionError("lambda2 must be > 0");
        }
        // Lambda2 = g^2 / (m^2 rho0^2 N^2)
        p.gravity_g = std::sqrt(*cfg.lambda2) * p.ref_vertical_wavenumber_m * p.density_rho0 * p.buoyancy_N;
    }
    validate(p);
    return Physics::make(p, cfg.model);
}

GridPtr make_grid(const GridSpec& spec)
{
    return make_grid(spec.spacing, spec.n, spec.k_min, spec.k_max);
}

ConstantsOptions constants_options(const RunConfig& cfg)
{
    ConstantsOptions o;
    o.working_order = cfg.run.working_order;
    o.monitored_orders = cfg.run.orders;
    return o;
}

RadialSpectrum make_initial(const RunConfig& cfg, const GridPtr& grid, const Physics& phys)
{
    const InitialSpec& s = cfg.initial;
    RadialSpectrum f = RadialSpectrum::zeros(grid);
    if (s.kind == "gaussian") {
        f = RadialSpectrum::sample(grid, [&](double k) {
            const double z = (k - s.center) / s.width;
            return s.amplitude * std::exp(-0.5 * z * z);
        });
    } else if (s.kind == "lognormal") {
        f = RadialSpectrum::sample(grid, [&](double k) {
            if (k <= 0.0) {
                return 0.0;
            }
            const double z = (std::log(k) - std::log(s.center)) / s.width;
            return s.amplitude * std::exp(-0.5 * z * z);
        });
    } else if (s.kind == "random") {
        SpectrumFamily family;
        family.order = cfg.run.working_order + 2.0;
        Rng rng(cfg.seed, 0);
        f = random_spectrum(grid, phys, family, rng);
    } else if (s.kind == "snapshot") {
        const RadialSpectrum snap = read_snapshot(s.path);
        if (!snap.grid().same_nodes(*grid)) {
            throw StructuralError("snapshot '" + s.path + "' is not on the configured grid");
        }
        f = RadialSpectrum(grid, std::vector<double>(snap.values().begin(), snap.values().end()));
    }

    std::optional<double> target = s.mass;
    if (s.mass_fraction) {
        target = *s.mass_fraction * certified_mass_limit(phys, cfg.run.T, constants_options(cfg));
    }
    if (target) {
        const double M0 = moment(f, 0.0, phys.disp, phys.params.dimension_d);
        if (M0 == 0.0) {
            return f;
        }
        std::vector<double> v(f.values().begin(), f.values().end());
        for (double& x : v) {
            x *= *target / M0;
        }
        f = RadialSpectrum(grid, std::move(v));
    }
    return f;
}

} // namespace broadkin
