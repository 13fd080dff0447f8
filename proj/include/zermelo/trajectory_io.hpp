#pragma once

#include <filesystem>
#include <string>

#include "zermelo/randers.hpp"

namespace zermelo {

// CSV layout: header `t,x1..xn,v1..vn,F`, one sample per line, 17 significant
// digits, LF endings. F is the Randers speed of the sample under `z`, or nan
// where the velocity vanishes.
std::string render_trajectory(const Trajectory& traj, const ZermeloData& z);
void export_trajectory(const Trajectory& traj, const ZermeloData& z, const std::filesystem::path& path);

/// Reads a file written by export_trajectory. The F column is checked for
/// syntax but not trusted. Throws parse_error with a line number.
Trajectory parse_trajectory(const std::string& text, Parameterization tag, const std::string& source = "<memory>");
Trajectory import_trajectory(const std::filesystem::path& path, Parameterization tag);

}  // namespace zermelo
