#include "zermelo/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "zermelo/errors.hpp"

namespace zermelo {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

bool RunReport::flag(std::string name, double metric, double threshold) {
  const bool pass = metric <= threshold;
  flags.push_back({std::move(name), pass, metric, threshold});
  return pass;
}

bool RunReport::all_pass() const {
  return std::all_of(flags.begin(), flags.end(), [](const ReportFlag& f) { return f.pass; });
}

std::string RunReport::status() const {
  if (error_code != "none") return "error";
  return all_pass() ? "pass" : "fail";
}

std::string RunReport::render() const {
  std::string out;
  auto line = [&out](std::string_view key, std::string_view value) {
    out.append(key).append(" = ").append(value).push_back('\n');
  };
  out += "[run]\n";
  line("command", command);
  line("scenario", scenario);
  line("digest", "fnv1a64:" + digest);
  line("status", status());
  line("exit_code", std::to_string(exit_code));
  line("error_code", error_code);
  // Messages are single-line in the report.
  std::string message = error_message;
  std::replace(message.begin(), message.end(), '\n', ' ');
  line("error_message", message);

  out += "\n[settings]\n";
  for (const auto& [k, v] : settings) line(k, v);
  out += "\n[metrics]\n";
  for (const auto& [k, v] : metrics) line(k, format_number(v));
  out += "\n[flags]\n";
  for (const ReportFlag& f : flags) {
    line(f.name, std::string(f.pass ? "pass" : "fail") + " metric=" + format_number(f.metric) +
                     " threshold=" + format_number(f.threshold));
  }
  out += "\n[timing]\n";
  for (const auto& [k, v] : timing) line(k, format_number(v));
  return out;
}

void RunReport::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write report " + path.string());
  out << render();
  if (!out) throw Error(ErrorCode::io_error, "failed writing report " + path.string());
}

}  // namespace zermelo
