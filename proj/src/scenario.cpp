#include "zermelo/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "zermelo/report.hpp"

namespace zermelo {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"format", "kind", "name"}},
      {"metric", {"type", "dim", "lambda"}},
      {"wind", {"type", "vector", "omega", "c", "term", "sigma"}},
      {"route", {"start", "goal"}},
      {"integrator", {"dt"}},
      {"solver", {"shoot_tol", "restarts", "max_newton"}},
      {"homothety", {"tol", "samples"}},
      {"oracle", {"K", "restarts", "seed", "tol", "dt", "bisection_depth", "slack"}},
      {"verify", {"full_throttle", "geodesic_residual", "length_relative", "endpoint"}},
      {"quantum", {"N", "H0", "U_I", "U_F", "tol", "max_iterations"}},
      {"checks", {"dt", "endpoint", "unit_norm", "schrodinger", "speed", "velocity"}},
  };
  return keys;
}

const std::set<std::string> navigation_sections{"",       "metric",    "wind",   "route", "integrator",
                                                "solver", "homothety", "oracle", "verify"};
const std::set<std::string> quantum_sections{"", "quantum", "checks"};

class Document {
 public:
  Document(std::string_view text, std::string source) : source_(std::move(source)) {
    std::string section;
    std::set<std::string> seen_sections{""};
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
      ++line_no;
      std::string line = raw;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (!allowed_keys().contains(section) || section.empty()) fail(line_no, "unknown section [" + section + "]");
        if (!seen_sections.insert(section).second) fail(line_no, "section [" + section + "] appears twice");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      Entry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
              line_no};
      if (e.key.empty()) fail(line_no, "missing key");
      if (e.value.empty()) fail(line_no, "missing value for '" + e.key + "'");
      if (!allowed_keys().at(section).contains(e.key)) {
        fail(line_no, "unknown key '" + e.key + "'" + (section.empty() ? "" : " in [" + section + "]"));
      }
      const bool repeatable = section == "wind" && e.key == "term";
      if (!repeatable && find(section, e.key)) fail(line_no, "duplicate key '" + e.key + "'");
      entries_.push_back(std::move(e));
    }
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    for (const Entry& e : entries_) {
      if (e.section == section && e.key == key) return &e;
    }
    return nullptr;
  }

  std::vector<const Entry*> find_all(const std::string& section, const std::string& key) const {
    std::vector<const Entry*> out;
    for (const Entry& e : entries_) {
      if (e.section == section && e.key == key) out.push_back(&e);
    }
    return out;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    if (const Entry* e = find(section, key)) return *e;
    throw Error(ErrorCode::parse_error, source_ + ": missing required key '" + key + "'" +
                                            (section.empty() ? "" : " in [" + section + "]"));
  }

  std::set<std::string> sections() const {
    std::set<std::string> out;
    for (const Entry& e : entries_) out.insert(e.section);
    return out;
  }

  [[noreturn]] void fail(int line, const std::string& what, ErrorCode code = ErrorCode::parse_error) const {
    throw Error(code, source_ + ":" + std::to_string(line) + ": " + what);
  }

  [[noreturn]] void fail(const Entry& e, const std::string& what, ErrorCode code = ErrorCode::parse_error) const {
    fail(e.line, e.key + ": " + what, code);
  }

  double number(const Entry& e, const std::string& word) const {
    double value = 0.0;
    const char* begin = word.data();
    const char* end = begin + word.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) fail(e, "'" + word + "' is not a finite number");
    return value;
  }

  double number(const Entry& e) const {
    const auto words = split_words(e.value);
    if (words.size() != 1) fail(e, "expected a single number");
    return number(e, words.front());
  }

  long long integer(const Entry& e) const {
    long long value = 0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) fail(e, "'" + e.value + "' is not an integer");
    return value;
  }

  Vector vector(const Entry& e) const {
    const auto words = split_words(e.value);
    Vector v(static_cast<Eigen::Index>(words.size()));
    for (std::size_t i = 0; i < words.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(e, words[i]);
    return v;
  }

  // Optional setting: parsed when present, otherwise recorded as defaulted.
  template <typename T, typename Parse>
  void optional(const std::string& section, const std::string& key, T& target, Parse&& parse,
                std::vector<std::string>& defaulted) const {
    if (const Entry* e = find(section, key)) {
      target = parse(*e);
    } else {
      defaulted.push_back(section + "." + key);
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<Entry> entries_;
};

double positive(const Document& doc, const Entry& e) {
  const double v = doc.number(e);
  if (!(v > 0.0)) doc.fail(e, "must be positive");
  return v;
}

int positive_int(const Document& doc, const Entry& e) {
  const long long v = doc.integer(e);
  if (v < 1 || v > 1'000'000) doc.fail(e, "must be a positive integer");
  return static_cast<int>(v);
}

quantum::CMatrix complex_matrix(const Document& doc, const Entry& e, int N) {
  if (e.value == "identity") return quantum::CMatrix::Identity(N, N);
  const auto words = split_words(e.value);
  if (static_cast<int>(words.size()) != 2 * N * N) {
    doc.fail(e, "expected " + std::to_string(2 * N * N) + " numbers (row-major re/im pairs), got " +
                    std::to_string(words.size()),
             ErrorCode::dimension_mismatch);
  }
  quantum::CMatrix M(N, N);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      const std::size_t at = 2 * static_cast<std::size_t>(r * N + c);
      M(r, c) = {doc.number(e, words[at]), doc.number(e, words[at + 1])};
    }
  }
  return M;
}

template <typename T, typename Build>
T checked_build(const Document& doc, const Entry& e, Build&& build) {
  try {
    return build();
  } catch (const Error& err) {
    doc.fail(e, err.what(), err.code());
  }
}

void parse_navigation(const Document& doc, ScenarioFile& s) {
  // Metric.
  const Entry& metric_type = doc.require("metric", "type");
  s.metric.type = metric_type.value;
  const Entry* dim = doc.find("metric", "dim");
  const Entry* lambda = doc.find("metric", "lambda");
  if (s.metric.type == "euclidean" || s.metric.type == "conformal") {
    s.metric.dimension = positive_int(doc, doc.require("metric", "dim"));
  } else if (s.metric.type == "polar") {
    if (dim) doc.fail(*dim, "polar metric is two-dimensional; remove 'dim'");
    s.metric.dimension = 2;
  } else {
    doc.fail(metric_type, "unknown metric builder '" + s.metric.type + "'");
  }
  if (s.metric.type == "conformal") {
    s.metric.lambda = doc.number(doc.require("metric", "lambda"));
  } else if (lambda) {
    doc.fail(*lambda, "only the conformal metric takes 'lambda'");
  }
  const int n = s.metric.dimension;

  // Wind.
  const Entry& wind_type = doc.require("wind", "type");
  s.wind.type = wind_type.value;
  const std::map<std::string, std::set<std::string>> wind_keys{
      {"constant", {"vector"}},           {"rotation", {"omega"}},  {"dilation", {"c"}},
      {"combo", {"c", "omega", "vector"}}, {"polynomial", {"term"}},
  };
  if (!wind_keys.contains(s.wind.type)) doc.fail(wind_type, "unknown wind builder '" + s.wind.type + "'");
  for (const std::string key : {"vector", "omega", "c", "term"}) {
    const bool wanted = wind_keys.at(s.wind.type).contains(key);
    const auto found = doc.find_all("wind", key);
    if (!wanted && !found.empty()) doc.fail(*found.front(), "not a parameter of the " + s.wind.type + " wind");
    if (wanted && found.empty()) {
      throw Error(ErrorCode::parse_error,
                  doc.source() + ": " + s.wind.type + " wind requires '" + key + "' in [wind]");
    }
  }
  if ((s.wind.type == "rotation" || s.wind.type == "combo") && n != 2) {
    doc.fail(wind_type, s.wind.type + " wind needs a two-dimensional metric", ErrorCode::dimension_mismatch);
  }
  if (const Entry* e = doc.find("wind", "vector")) {
    s.wind.vector = doc.vector(*e);
    if (s.wind.vector.size() != n) doc.fail(*e, "expected " + std::to_string(n) + " components",
                                            ErrorCode::dimension_mismatch);
  }
  if (const Entry* e = doc.find("wind", "omega")) s.wind.omega = doc.number(*e);
  if (const Entry* e = doc.find("wind", "c")) s.wind.c = doc.number(*e);
  for (const Entry* e : doc.find_all("wind", "term")) {
    // term = <component> <coefficient> <exponent_1> ... <exponent_n>
    const auto words = split_words(e->value);
    if (static_cast<int>(words.size()) != n + 2) {
      doc.fail(*e, "expected component, coefficient and " + std::to_string(n) + " exponents",
               ErrorCode::dimension_mismatch);
    }
    builtin::PolynomialTerm term;
    const double component = doc.number(*e, words[0]);
    if (component != std::floor(component) || component < 1 || component > n) {
      doc.fail(*e, "component must be an integer in 1.." + std::to_string(n));
    }
    term.component = static_cast<int>(component) - 1;
    term.coefficient = doc.number(*e, words[1]);
    for (int i = 0; i < n; ++i) {
      const double p = doc.number(*e, words[2 + i]);
      if (p != std::floor(p) || p < 0) doc.fail(*e, "exponents must be non-negative integers");
      term.exponents.push_back(static_cast<int>(p));
    }
    if (std::accumulate(term.exponents.begin(), term.exponents.end(), 0) > builtin::max_polynomial_degree) {
      doc.fail(*e, "total degree above " + std::to_string(builtin::max_polynomial_degree));
    }
    s.wind.terms.push_back(std::move(term));
  }
  if (const Entry* e = doc.find("wind", "sigma")) s.wind.declared_sigma = doc.number(*e);

  // Route.
  const Entry& start = doc.require("route", "start");
  const Entry& goal = doc.require("route", "goal");
  s.start = doc.vector(start);
  s.goal = doc.vector(goal);
  if (s.start.size() != n) doc.fail(start, "expected " + std::to_string(n) + " coordinates", ErrorCode::dimension_mismatch);
  if (s.goal.size() != n) doc.fail(goal, "expected " + std::to_string(n) + " coordinates", ErrorCode::dimension_mismatch);
  if (s.start == s.goal) doc.fail(goal, "goal coincides with start");

  auto pos = [&](const Entry& e) { return positive(doc, e); };
  auto pos_int = [&](const Entry& e) { return positive_int(doc, e); };
  auto& d = s.defaulted;
  doc.optional("integrator", "dt", s.solver.ode_dt, pos, d);
  doc.optional("solver", "shoot_tol", s.solver.shoot_tol, pos, d);
  doc.optional("solver", "restarts", s.solver.restarts, pos_int, d);
  doc.optional("solver", "max_newton", s.solver.max_newton_iterations, pos_int, d);
  doc.optional("homothety", "tol", s.homothety.tol, pos, d);
  doc.optional("homothety", "samples", s.homothety.samples, pos_int, d);
  doc.optional("oracle", "K", s.oracle.K, pos_int, d);
  doc.optional("oracle", "restarts", s.oracle.restarts, pos_int, d);
  doc.optional("oracle", "seed", s.oracle.seed,
               [&](const Entry& e) {
                 std::uint64_t v = 0;
                 auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
                 if (ec != std::errc() || ptr != e.value.data() + e.value.size()) doc.fail(e, "expected an unsigned integer");
                 return v;
               },
               d);
  doc.optional("oracle", "tol", s.oracle.tol, pos, d);
  doc.optional("oracle", "dt", s.oracle.dt, pos, d);
  doc.optional("oracle", "bisection_depth", s.oracle.bisection_depth, pos_int, d);
  doc.optional("oracle", "slack", s.oracle.slack, pos, d);
  doc.optional("verify", "full_throttle", s.thresholds.full_throttle, pos, d);
  doc.optional("verify", "geodesic_residual", s.thresholds.geodesic_residual, pos, d);
  doc.optional("verify", "length_relative", s.thresholds.length_relative, pos, d);
  doc.optional("verify", "endpoint", s.thresholds.endpoint, pos, d);
  s.thresholds.oracle_slack = s.oracle.slack;

  // Builders must exist and the wind must be admissible at both endpoints.
  const ZermeloData z = checked_build<ZermeloData>(doc, wind_type, [&] { return build_zermelo(s); });
  for (const auto& [entry, point] : {std::pair{&start, s.start}, std::pair{&goal, s.goal}}) {
    const double w = checked_build<double>(doc, *entry, [&] { return wind_norm(z, point); });
    if (!(w < 1.0)) {
      std::ostringstream os;
      os << "wind h-norm " << w << " at this point is not below 1";
      doc.fail(*entry, os.str(), ErrorCode::wind_too_strong);
    }
  }
}

void parse_quantum(const Document& doc, ScenarioFile& s) {
  const Entry& n_entry = doc.require("quantum", "N");
  const int N = positive_int(doc, n_entry);
  if (N > 8) doc.fail(n_entry, "dimensions above 8 are not supported");
  const Entry& h0 = doc.require("quantum", "H0");
  const Entry& ui = doc.require("quantum", "U_I");
  const Entry& uf = doc.require("quantum", "U_F");
  s.gates.H0 = checked_build<quantum::HermitianOp>(doc, h0, [&] { return quantum::HermitianOp(complex_matrix(doc, h0, N)); });
  if (!(quantum::hs_norm(s.gates.H0) < 1.0)) doc.fail(h0, "Hilbert-Schmidt norm must be below 1");
  s.gates.U_I = checked_build<quantum::UnitaryGate>(doc, ui, [&] { return quantum::UnitaryGate(complex_matrix(doc, ui, N)); });
  s.gates.U_F = checked_build<quantum::UnitaryGate>(doc, uf, [&] { return quantum::UnitaryGate(complex_matrix(doc, uf, N)); });

  auto pos = [&](const Entry& e) { return positive(doc, e); };
  auto& d = s.defaulted;
  doc.optional("quantum", "tol", s.gate_options.tol, pos, d);
  doc.optional("quantum", "max_iterations", s.gate_options.max_iterations,
               [&](const Entry& e) { return positive_int(doc, e); }, d);
  doc.optional("checks", "dt", s.quantum_checks.dt, pos, d);
  doc.optional("checks", "endpoint", s.quantum_checks.endpoint, pos, d);
  doc.optional("checks", "unit_norm", s.quantum_checks.unit_norm, pos, d);
  doc.optional("checks", "schrodinger", s.quantum_checks.schrodinger, pos, d);
  doc.optional("checks", "speed", s.quantum_checks.speed, pos, d);
  doc.optional("checks", "velocity", s.quantum_checks.velocity, pos, d);
}

}  // namespace

ScenarioFile parse_scenario_text(std::string_view text, std::string source) {
  const Document doc(text, source);
  ScenarioFile s;
  s.source = source;
  s.content = std::string(text);

  const Entry& format = doc.require("", "format");
  s.format_version = static_cast<int>(doc.integer(format));
  if (s.format_version != supported_format_version) {
    doc.fail(format, "unsupported format version " + format.value);
  }
  const Entry& kind = doc.require("", "kind");
  if (kind.value == "navigation") {
    s.kind = ScenarioKind::navigation;
  } else if (kind.value == "quantum") {
    s.kind = ScenarioKind::quantum;
  } else {
    doc.fail(kind, "kind must be 'navigation' or 'quantum'");
  }
  if (const Entry* name = doc.find("", "name")) s.name = name->value;

  const auto& permitted = s.kind == ScenarioKind::navigation ? navigation_sections : quantum_sections;
  for (const std::string& section : doc.sections()) {
    if (!permitted.contains(section)) {
      throw Error(ErrorCode::parse_error,
                  source + ": section [" + section + "] is not valid for a " + kind.value + " scenario");
    }
  }
  if (s.kind == ScenarioKind::navigation) {
    parse_navigation(doc, s);
  } else {
    parse_quantum(doc, s);
  }
  return s;
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.string());
}

MetricField build_metric(const MetricSpec& spec) {
  if (spec.type == "euclidean") return builtin::euclidean(spec.dimension);
  if (spec.type == "polar") return builtin::polar();
  if (spec.type == "conformal") return builtin::conformal(spec.lambda, spec.dimension);
  throw Error(ErrorCode::parse_error, "unknown metric builder '" + spec.type + "'");
}

WindField build_wind(const WindSpec& spec, int dimension) {
  WindField W;
  if (spec.type == "constant") {
    W = builtin::constant(spec.vector);
  } else if (spec.type == "rotation") {
    W = builtin::rotation(spec.omega);
  } else if (spec.type == "dilation") {
    W = builtin::dilation(spec.c, dimension);
  } else if (spec.type == "combo") {
    W = builtin::combo(spec.c, spec.omega, spec.vector);
  } else if (spec.type == "polynomial") {
    W = builtin::polynomial(dimension, spec.terms);
  } else {
    throw Error(ErrorCode::parse_error, "unknown wind builder '" + spec.type + "'");
  }
  if (W.dimension != dimension) throw Error(ErrorCode::dimension_mismatch, "wind and metric dimensions differ");
  W.declared_sigma = spec.declared_sigma;
  return W;
}

ZermeloData build_zermelo(const ScenarioFile& scenario) {
  return {build_metric(scenario.metric), build_wind(scenario.wind, scenario.metric.dimension)};
}

std::vector<std::pair<std::string, std::string>> describe_settings(const ScenarioFile& s) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string key, double v) { out.emplace_back(std::move(key), format_number(v)); };
  if (s.kind == ScenarioKind::quantum) {
    out.emplace_back("quantum.N", std::to_string(s.gates.H0.dimension()));
    add("quantum.tol", s.gate_options.tol);
    out.emplace_back("quantum.max_iterations", std::to_string(s.gate_options.max_iterations));
    add("checks.dt", s.quantum_checks.dt);
    add("checks.endpoint", s.quantum_checks.endpoint);
    add("checks.unit_norm", s.quantum_checks.unit_norm);
    add("checks.schrodinger", s.quantum_checks.schrodinger);
    add("checks.speed", s.quantum_checks.speed);
    add("checks.velocity", s.quantum_checks.velocity);
  } else {
    out.emplace_back("metric.type", s.metric.type);
    out.emplace_back("metric.dim", std::to_string(s.metric.dimension));
    out.emplace_back("wind.type", s.wind.type);
    add("integrator.dt", s.solver.ode_dt);
    add("solver.shoot_tol", s.solver.shoot_tol);
    out.emplace_back("solver.restarts", std::to_string(s.solver.restarts));
    out.emplace_back("solver.max_newton", std::to_string(s.solver.max_newton_iterations));
    add("homothety.tol", s.homothety.tol);
    out.emplace_back("homothety.samples", std::to_string(s.homothety.samples));
    out.emplace_back("oracle.K", std::to_string(s.oracle.K));
    out.emplace_back("oracle.restarts", std::to_string(s.oracle.restarts));
    out.emplace_back("oracle.seed", std::to_string(s.oracle.seed));
    add("oracle.tol", s.oracle.tol);
    add("oracle.dt", s.oracle.dt);
    out.emplace_back("oracle.bisection_depth", std::to_string(s.oracle.bisection_depth));
    add("oracle.slack", s.oracle.slack);
    add("verify.full_throttle", s.thresholds.full_throttle);
    add("verify.geodesic_residual", s.thresholds.geodesic_residual);
    add("verify.length_relative", s.thresholds.length_relative);
    add("verify.endpoint", s.thresholds.endpoint);
  }
  std::string defaulted;
  for (const std::string& key : s.defaulted) defaulted += (defaulted.empty() ? "" : " ") + key;
  out.emplace_back("defaulted", defaulted.empty() ? "none" : defaulted);
  return out;
}

}  // namespace zermelo
