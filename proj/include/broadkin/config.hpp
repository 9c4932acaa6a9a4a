#pragma once

#include "broadkin/integrator.hpp"
#include "broadkin/verify.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace broadkin {

struct GridSpec {
    std::size_t n = 128;
    double k_min = 0.0;
    double k_max = 4.0;
    Spacing spacing = Spacing::uniform;
};

/// Initial spectrum recipe.
///   zero       f = 0
///   gaussian   amplitude exp(-(k - center)^2 / (2 width^2))
///   lognormal  amplitude exp(-(ln k - ln center)^2 / (2 width^2))
///   random     one member of the verification family, drawn from the seed
///   snapshot   nodal values read from a "k,f" CSV on the configured grid
/// After construction f is rescaled when mass (absolute M_0) or
/// mass_fraction (fraction of the certified mass limit) is given.
struct InitialSpec {
    std::string kind = "gaussian";
    double amplitude = 1.0;
    double center = 1.0;
    double width = 0.2;
    std::string path;
    std::optional<double> mass;
    std::optional<double> mass_fraction;
};

struct RunSettings {
    double T = 1.0;
    std::optional<double> dt;
    std::optional<double> truncation_R;
    double working_order = 2.0;
    std::vector<double> orders{0.0, 2.0, 5.0};
    Stepper stepper = Stepper::euler;
    std::size_t snapshot_every = 0;
    double tolerance = 1e-6;
    std::string output_dir = "broadkin_out";
};

struct VerifySettings {
    SuiteOptions suite;
    double weight_scale = 1.0; // fault injection into the triad quadrature
    std::string output_dir = "broadkin_verify";
};

struct RunConfig {
    PhysicalParams params;
    std::optional<double> lambda1; // overrides F when given
    std::optional<double> lambda2; // overrides g when given
    ModelSelection model;
    GridSpec grid;
    InitialSpec initial;
    RunSettings run;
    VerifySettings verify;
    std::uint64_t seed = 0;
    // section.key = value pairs in file order, for the manifest echo
    std::vector<std::pair<std::string, std::string>> echo;
};

/// Flat "key = value" text with "[section]" headers; '#' starts a comment.
/// Unknown sections or keys and malformed values raise ParseError with the
/// source name, line number and key.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

Physics make_physics(const RunConfig& cfg);
GridPtr make_grid(const GridSpec& spec);
ConstantsOptions constants_options(const RunConfig& cfg);
RadialSpectrum make_initial(const RunConfig& cfg, const GridPtr& grid, const Physics& phys);

std::vector<double> parse_orders(const std::string& text);

} // namespace broadkin
