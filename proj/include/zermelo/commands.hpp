#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "zermelo/errors.hpp"
#include "zermelo/report.hpp"

namespace zermelo {

enum class Command { solve, oracle, verify, convert, quantum };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;  // overrides the oracle seed
  std::optional<double> dt;           // overrides the integrator step
  std::optional<std::filesystem::path> trajectory;  // verify: claimed solution
};

namespace exit_status {
inline constexpr int pass = 0;
inline constexpr int verification_failure = 2;
inline constexpr int not_homothety = 3;
inline constexpr int parse_error = 4;
inline constexpr int numerical_failure = 5;
}  // namespace exit_status

int exit_code_for(ErrorCode code);

/// Runs one command end to end. Never throws: module errors are folded into
/// the report's exit code and error fields. Writes `report.txt` plus the
/// command's artifacts into out_dir.
RunReport run_command(Command command, const RunOptions& options);

}  // namespace zermelo
