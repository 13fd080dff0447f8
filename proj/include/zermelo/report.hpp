#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zermelo {

/// Shortest round-trippable rendering ("%.17g").
std::string format_number(double value);

/// 64-bit FNV-1a of the bytes, as 16 lower-case hex digits.
std::string fnv1a64(std::string_view bytes);

// A pass/fail flag is always paired with the metric and threshold it was
// decided from.
struct ReportFlag {
  std::string name;
  bool pass = false;
  double metric = 0.0;
  double threshold = 0.0;
};

struct RunReport {
  std::string command;
  std::string scenario;
  std::string digest;
  int exit_code = 0;
  std::string error_code = "none";
  std::string error_message;

  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<ReportFlag> flags;
  std::vector<std::pair<std::string, double>> timing;

  void metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
  // Records a flag that passes when metric <= threshold.
  bool flag(std::string name, double metric, double threshold);
  bool all_pass() const;
  std::string status() const;

  /// Key-value text with [run], [settings], [metrics], [flags] and a trailing
  /// [timing] section. Everything above [timing] is deterministic.
  std::string render() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace zermelo
