#include "broadkin/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace broadkin {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot(std::ostream& out, const RadialSpectrum& f)
{
    out << "k,f\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << format_double(f.grid()[i]) << ',' << format_double(f[i]) << '\n';
    }
}

void write_snapshot(const std::string& path, const RadialSpectrum& f)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write snapshot '" + path + "'");
    }
    write_snapshot(out, f);
    if (!out) {
        throw IoError("write failed for snapshot '" + path + "'");
    }
}

namespace {

bool constant_ratio(const std::vector<double>& k)
{
    if (k.front() <= 0.0) {
        return false;
    }
    const double r = std::log(k[1] / k[0]);
    for (std::size_t i = 2; i < k.size(); ++i) {
        if (std::abs(std::log(k[i] / k[i - 1]) - r) > 1e-9 * std::abs(r)) {
            return false;
        }
    }
    return true;
}

} // namespace

RadialSpectrum read_snapshot(std::istream& in, const std::string& source)
{
    std::string line;
    int n = 0;
    auto fail = [&](const std::string& why) {
        throw ParseError(source + ":" + std::to_string(n) + ": " + why);
    };
    if (!std::getline(in, line)) {
        fail("empty snapshot");
    }
    ++n;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "k,f") {
        fail("expected header 'k,f', got '" + line + "'");
    }
    std::vector<double> k, f;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            fail("expected 'k,f', got '" + line + "'");
        }
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end = nullptr;
        const double kv = std::strtod(a.c_str(), &end);
        if (a.empty() || end != a.c_str() + a.size() || !std::isfinite(kv)) {
            fail("malformed k '" + a + "'");
        }
        const double fv = std::strtod(b.c_str(), &end);
        if (b.empty() || end != b.c_str() + b.size() || !std::isfinite(fv)) {
            fail("malformed f '" + b + "'");
        }
        if (fv < 0.0) {
            fail("negative f");
        }
        if (!k.empty() && !(kv > k.back())) {
            fail("wavenumbers must increase strictly");
        }
        k.push_back(kv);
        f.push_back(fv);
    }
    if (k.size() < 2) {
        fail("snapshot needs at least two nodes");
    }
    const Spacing spacing = constant_ratio(k) ? Spacing::logarithmic : Spacing::uniform;
    auto grid = std::make_shared<const RadialGrid>(RadialGrid::from_nodes(std::move(k), spacing));
    return RadialSpectrum(std::move(grid), std::move(f));
}

RadialSpectrum read_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open snapshot '" + path + "'");
    }
    return read_snapshot(in, path);
}

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    out << "t,dt,min_f";
    if (!traj.records.empty()) {
        for (double m : traj.records.front().moments.orders) {
            out << ",M_" << format_double(m);
        }
    }
    out << ",gronwall_margin,omega_margin\n";
    for (const auto& r : traj.records) {
        out << format_double(r.time) << ',' << format_double(r.dt) << ',' << format_double(r.min_value);
        for (double v : r.moments.values) {
            out << ',' << format_double(v);
        }
        out << ',' << format_double(r.gronwall_margin) << ',' << format_double(r.omega_set_margin) << '\n';
    }
}

void write_manifest(std::ostream& out, const RunConfig& cfg, const AnalyticConstants& c,
                    double truncation_R, double step_bound_half, double dt,
                    const std::vector<std::pair<std::string, std::string>>& extra)
{
    out << "# broadkin run manifest\n";
    out << "broadkin_version = 1.0.0\n";
    for (const auto& [key, value] : cfg.echo) {
        out << "config." << key << " = " << value << '\n';
    }
    const Physics phys = make_physics(cfg);
    out << "derived.lambda1 = " << format_double(phys.disp.lambda1) << '\n';
    out << "derived.lambda2 = " << format_double(phys.disp.lambda2) << '\n';
    out << "constants.gain_order = " << format_double(c.gain_order) << '\n';
    out << "constants.gain_bilinear_K0 = " << format_double(c.gain_bilinear) << '\n';
    out << "constants.mass_bound_B = " << format_double(c.mass_bound) << '\n';
    out << "constants.gain_constant_K = " << format_double(c.gain_constant_K) << '\n';
    out << "constants.C_hat = " << format_double(c.C_hat) << '\n';
    out << "constants.gronwall_Ctilde = " << format_double(c.gronwall_Ctilde) << '\n';
    out << "constants.theta_star = " << format_double(c.theta_star) << '\n';
    out << "constants.loss_A1 = " << format_double(c.loss_A1) << '\n';
    out << "constants.loss_A2 = " << format_double(c.loss_A2) << '\n';
    out << "constants.varsigma = " << format_double(c.varsigma) << '\n';
    out << "constants.horizon_T = " << format_double(c.horizon_T) << '\n';
    out << "constants.viscosity_nu = " << format_double(phys.params.viscosity_nu) << '\n';
    out << "constants.damping_exponent_gamma = " << format_double(phys.params.damping_exponent_gamma) << '\n';
    out << "run.truncation_R = " << format_double(truncation_R) << '\n';
    out << "run.step_bound_half = " << format_double(step_bound_half) << '\n';
    out << "run.dt = " << format_double(dt) << '\n';
    out << "run.tolerance = " << format_double(cfg.run.tolerance) << '\n';
    for (const auto& [key, value] : extra) {
        out << key << " = " << value << '\n';
    }
}

void ensure_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir + "'" + (ec ? ": " + ec.message() : ""));
    }
    const std::string probe = (std::filesystem::path(dir) / ".broadkin_write_probe").string();
    {
        std::ofstream out(probe);
        if (!out) {
            throw IoError("output directory '" + dir + "' is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

} // namespace broadkin
