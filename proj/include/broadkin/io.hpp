#pragma once

#include "broadkin/config.hpp"
#include "broadkin/integrator.hpp"

#include <iosfwd>
#include <string>

namespace broadkin {

/// "%.17g": enough digits for every double to read back bit-identical.
std::string format_double(double v);

/// Snapshot CSV with header "k,f".
void write_snapshot(std::ostream& out, const RadialSpectrum& f);
void write_snapshot(const std::string& path, const RadialSpectrum& f);

/// Reads a snapshot. Nodes with a constant ratio are taken as a logarithmic
/// grid, anything else gets the trapezoid rule.
RadialSpectrum read_snapshot(std::istream& in, const std::string& source = "<snapshot>");
RadialSpectrum read_snapshot(const std::string& path);

/// "t,dt,min_f,M_<m>...,gronwall_margin,omega_margin", one row per record.
void write_trajectory(std::ostream& out, const Trajectory& traj);

/// key = value manifest: config echo, derived constants and run summary.
void write_manifest(std::ostream& out, const RunConfig& cfg, const AnalyticConstants& consts,
                    double truncation_R, double step_bound_half, double dt,
                    const std::vector<std::pair<std::string, std::string>>& extra);

/// Creates the directory if needed; IoError when it cannot be written.
void ensure_directory(const std::string& dir);

} // namespace broadkin
