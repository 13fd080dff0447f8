#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zermelo/builtins.hpp"
#include "zermelo/oracle.hpp"
#include "zermelo/quantum.hpp"
#include "zermelo/randers.hpp"
#include "zermelo/solver.hpp"

namespace zermelo {

enum class ScenarioKind { navigation, quantum };

struct MetricSpec {
  std::string type = "euclidean";  // euclidean | polar | conformal
  int dimension = 2;
  double lambda = 0.0;
};

struct WindSpec {
  std::string type = "constant";  // constant | rotation | dilation | combo | polynomial
  Vector vector;
  double omega = 0.0;
  double c = 0.0;
  std::vector<builtin::PolynomialTerm> terms;
  std::optional<double> declared_sigma;
};

struct HomothetySettings {
  double tol = 1e-6;
  int samples = 20;
};

struct QuantumChecks {
  double dt = 1e-3;
  double endpoint = 1e-8;
  double unit_norm = 1e-9;
  double schrodinger = 1e-4;
  double speed = 1e-5;
  double velocity = 1e-5;
};

struct ScenarioFile {
  int format_version = 1;
  ScenarioKind kind = ScenarioKind::navigation;
  std::string name;

  MetricSpec metric;
  WindSpec wind;
  ChartPoint start;
  ChartPoint goal;
  ShootSettings solver;
  HomothetySettings homothety;
  OracleSettings oracle;
  VerifyThresholds thresholds;

  quantum::GateProblem gates;
  quantum::GateSolveOptions gate_options;
  QuantumChecks quantum_checks;

  std::string source;   // file path or label
  std::string content;  // raw bytes, for the digest
  // Every setting that fell back to its default, as "section.key".
  std::vector<std::string> defaulted;
};

inline constexpr int supported_format_version = 1;

/// Strict parser for the line-oriented scenario format (see docs/scenario-format.md).
/// Errors carry `source:line` diagnostics.
ScenarioFile parse_scenario(const std::filesystem::path& path);
ScenarioFile parse_scenario_text(std::string_view text, std::string source = "<memory>");

MetricField build_metric(const MetricSpec& spec);
WindField build_wind(const WindSpec& spec, int dimension);
ZermeloData build_zermelo(const ScenarioFile& scenario);

/// Effective settings as (key, value) pairs, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe_settings(const ScenarioFile& scenario);

}  // namespace zermelo
