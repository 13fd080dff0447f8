#include "zermelo/commands.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include "zermelo/geometry.hpp"
#include "zermelo/oracle.hpp"
#include "zermelo/quantum.hpp"
#include "zermelo/randers.hpp"
#include "zermelo/scenario.hpp"
#include "zermelo/solver.hpp"
#include "zermelo/trajectory_io.hpp"

namespace zermelo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Raised for problems with the invocation itself (wrong scenario kind).
struct UsageError : Error {
  using Error::Error;
};

struct Context {
  const RunOptions& options;
  ScenarioFile scenario;
  RunReport& report;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << text;
}

// Homothety is judged on seeded samples from the start/goal bounding box,
// padded by a quarter of its diagonal, plus the endpoints themselves.
std::vector<ChartPoint> homothety_samples(const ScenarioFile& s, const MetricField& h) {
  const Vector lo = s.start.cwiseMin(s.goal);
  const Vector hi = s.start.cwiseMax(s.goal);
  const double pad = 0.25 * (hi - lo).norm();
  std::mt19937_64 rng(s.oracle.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ChartPoint> points{s.start, s.goal};
  for (int attempt = 0; static_cast<int>(points.size()) < s.homothety.samples + 2 && attempt < 100 * s.homothety.samples;
       ++attempt) {
    ChartPoint x(lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] - pad + (hi[i] - lo[i] + 2 * pad) * unit(rng);
    try {
      evaluate_metric(h, x);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::domain_exit) continue;  // e.g. r ≤ 0 in the polar chart
      throw;
    }
    points.push_back(std::move(x));
  }
  return points;
}

NavigationProblem navigation_problem(Context& ctx) {
  const ScenarioFile& s = ctx.scenario;
  NavigationProblem prob{build_zermelo(s), s.start, s.goal, 0.0, s.solver};

  const auto points = homothety_samples(s, prob.z.h);
  const HomothetyEstimate est = homothety_sigma(prob.z.h, prob.z.W, points, s.homothety.tol);
  ctx.report.metric("sigma", est.sigma);
  ctx.report.metric("homothety_residual", est.worst_residual);
  ctx.report.metric("homothety_spread", est.spread);
  if (s.wind.declared_sigma) {
    const double mismatch = std::abs(*s.wind.declared_sigma - est.sigma);
    ctx.report.metric("declared_sigma", *s.wind.declared_sigma);
    if (!ctx.report.flag("declared_sigma", mismatch, s.homothety.tol)) {
      throw Error(ErrorCode::not_homothety, "declared sigma " + format_number(*s.wind.declared_sigma) +
                                                " disagrees with the estimate " + format_number(est.sigma));
    }
  }
  prob.sigma = est.sigma;
  return prob;
}

void record_solution(RunReport& report, const SolutionReport& v, const VerifyThresholds& th) {
  report.metric("T", v.T);
  report.metric("full_throttle_deviation", v.full_throttle_deviation);
  report.metric("geodesic_residual", v.geodesic_residual);
  report.metric("speed_law_deviation", v.speed_law_deviation);
  report.metric("randers_length", v.randers_length);
  report.metric("length_error", v.length_error);
  report.metric("start_error", v.start_error);
  report.metric("goal_error", v.goal_error);
  report.flag("full_throttle", v.full_throttle_deviation, th.full_throttle);
  report.flag("geodesic_residual", v.geodesic_residual, th.geodesic_residual);
  report.flag("length_relative", v.T > 0 ? v.length_error / v.T : v.length_error, th.length_relative);
  report.flag("start_endpoint", v.start_error, th.endpoint);
  report.flag("goal_endpoint", v.goal_error, th.endpoint);
}

void run_solve(Context& ctx) {
  const NavigationProblem prob = navigation_problem(ctx);
  auto t0 = Clock::now();
  const NavigationSolution sol = intercept_shoot(prob);
  ctx.report.timing.emplace_back("solve_seconds", seconds_since(t0));
  ctx.report.metric("roots_found", static_cast<double>(sol.roots.size()));
  ctx.report.metric("shoot_miss", sol.roots.empty() ? 0.0 : sol.roots.front().miss);

  t0 = Clock::now();
  const SolutionReport v = verify_solution(prob, sol, std::nullopt, ctx.scenario.thresholds);
  ctx.report.timing.emplace_back("verify_seconds", seconds_since(t0));
  record_solution(ctx.report, v, ctx.scenario.thresholds);

  export_trajectory(sol.q_traj, prob.z, ctx.options.out_dir / "trajectory.csv");
  export_trajectory(sol.p_traj, prob.z, ctx.options.out_dir / "frame_curve.csv");
}

void run_oracle(Context& ctx) {
  const NavigationProblem prob = navigation_problem(ctx);
  const OracleSettings& os = ctx.scenario.oracle;
  const auto t0 = Clock::now();
  const OracleResult res = oracle_min_time(prob.z, prob.start, prob.goal, os);
  ctx.report.timing.emplace_back("oracle_seconds", seconds_since(t0));
  ctx.report.metric("oracle_T", res.T);
  ctx.report.metric("oracle_miss", res.miss);
  ctx.report.metric("feasibility_checks", res.feasibility_checks);
  ctx.report.flag("oracle_arrival", res.miss, os.tol);
  export_trajectory(simulate_control(prob.z, prob.start, res.witness, prob.settings.ode_dt), prob.z,
                    ctx.options.out_dir / "oracle_trajectory.csv");
}

void run_verify(Context& ctx) {
  const NavigationProblem prob = navigation_problem(ctx);
  NavigationSolution sol;
  const auto default_path = ctx.options.out_dir / "trajectory.csv";
  if (ctx.options.trajectory) {
    sol.q_traj = import_trajectory(*ctx.options.trajectory, Parameterization::physical);
  } else if (std::filesystem::exists(default_path)) {
    sol.q_traj = import_trajectory(default_path, Parameterization::physical);
  } else {
    const auto t0 = Clock::now();
    sol = intercept_shoot(prob);
    ctx.report.timing.emplace_back("solve_seconds", seconds_since(t0));
    export_trajectory(sol.q_traj, prob.z, default_path);
  }
  if (sol.T == 0.0) sol.T = sol.q_traj.duration();
  if (sol.q_traj.dimension() != prob.start.size()) {
    throw Error(ErrorCode::dimension_mismatch, "trajectory dimension does not match the scenario");
  }

  auto t0 = Clock::now();
  const SolutionReport v = verify_solution(prob, sol, std::nullopt, ctx.scenario.thresholds);
  ctx.report.timing.emplace_back("verify_seconds", seconds_since(t0));
  record_solution(ctx.report, v, ctx.scenario.thresholds);

  t0 = Clock::now();
  const Certification cert = compare_with_solver(prob, sol, ctx.scenario.oracle);
  ctx.report.timing.emplace_back("oracle_seconds", seconds_since(t0));
  ctx.report.metric("oracle_T", cert.oracle_T);
  ctx.report.metric("oracle_gap", cert.gap);
  ctx.report.flag("oracle_gap", cert.gap, cert.slack);
  export_trajectory(simulate_control(prob.z, prob.start, cert.oracle.witness, prob.settings.ode_dt), prob.z,
                    ctx.options.out_dir / "oracle_trajectory.csv");
}

void run_convert(Context& ctx) {
  const ScenarioFile& s = ctx.scenario;
  const ZermeloData z = build_zermelo(s);
  const RandersData r = zermelo_to_randers(z);
  const ZermeloData back = randers_to_zermelo(r);
  const int n = s.metric.dimension;

  std::string table;
  for (int i = 1; i <= n; ++i) table += (i > 1 ? ",x" : "x") + std::to_string(i);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) table += ",alpha" + std::to_string(i) + std::to_string(j);
  for (int i = 1; i <= n; ++i) table += ",beta" + std::to_string(i);
  table += ",wind_norm,roundtrip_error\n";

  constexpr int points = 11;
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const ChartPoint x = s.start + (s.goal - s.start) * (static_cast<double>(k) / (points - 1));
    const RandersPoint<double> ab = evaluate(r, x);
    const ZermeloPoint<double> orig = evaluate(z, x);
    const ZermeloPoint<double> rt = evaluate(back, x);
    const double err = std::max((rt.h - orig.h).cwiseAbs().maxCoeff() / std::max(1.0, orig.h.norm()),
                                (rt.wind - orig.wind).cwiseAbs().maxCoeff() / std::max(1.0, orig.wind.norm()));
    worst = std::max(worst, err);
    for (int i = 0; i < n; ++i) table += (i ? "," : "") + format_number(x[i]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) table += "," + format_number(ab.alpha(i, j));
    for (int i = 0; i < n; ++i) table += "," + format_number(ab.beta[i]);
    table += "," + format_number(wind_norm(z, x)) + "," + format_number(err) + "\n";
  }
  write_text(ctx.options.out_dir / "randers_table.csv", table);
  ctx.report.metric("table_rows", points);
  ctx.report.metric("roundtrip_error", worst);
  ctx.report.flag("roundtrip", worst, 1e-9);
}

void run_quantum(Context& ctx) {
  using namespace quantum;
  const ScenarioFile& s = ctx.scenario;
  const QuantumChecks& qc = s.quantum_checks;
  const auto t0 = Clock::now();
  const GateSolution sol = solve_gate_navigation(s.gates, s.gate_options);
  ctx.report.timing.emplace_back("solve_seconds", seconds_since(t0));

  ctx.report.metric("T", sol.T);
  ctx.report.metric("iterations", sol.iterations);
  ctx.report.metric("degenerate", sol.degenerate ? 1.0 : 0.0);
  ctx.report.metric("branch_warning", sol.branch_warning ? 1.0 : 0.0);
  const double unit_dev = std::abs(hs_norm(sol.H1_0) - 1.0);
  const CMatrix& U_I = s.gates.U_I.matrix();
  const double endpoint = hs_distance(propagate_closed_form(s.gates.H0, sol.H1_0, U_I, sol.T), s.gates.U_F.matrix());
  ctx.report.metric("control_norm_deviation", unit_dev);
  ctx.report.metric("endpoint_error", endpoint);
  ctx.report.flag("control_unit_norm", unit_dev, qc.unit_norm);
  ctx.report.flag("endpoint", endpoint, qc.endpoint);

  std::vector<double> grid;
  const int steps = std::max(2, static_cast<int>(std::ceil(std::max(sol.T, qc.dt) / qc.dt)));
  for (int k = 0; k <= steps; ++k) grid.push_back(std::max(sol.T, qc.dt) * k / steps);
  const double residual = schrodinger_residual(s.gates.H0, sol.H1_0, U_I, grid);
  const InteractionReport ir = interaction_curve_checks(s.gates.H0, sol.H1_0, U_I, grid);
  ctx.report.metric("schrodinger_residual", residual);
  ctx.report.metric("interaction_closed_form_error", ir.closed_form_error);
  ctx.report.metric("interaction_speed_deviation", ir.speed_deviation);
  ctx.report.metric("interaction_velocity_deviation", ir.velocity_deviation);
  ctx.report.flag("schrodinger_residual", residual, qc.schrodinger);
  ctx.report.flag("interaction_unit_speed", ir.speed_deviation, qc.speed);
  ctx.report.flag("interaction_velocity", ir.velocity_deviation, qc.velocity);

  std::string table = "row,col,re,im\n";
  const CMatrix& H = sol.H1_0.matrix();
  for (Eigen::Index i = 0; i < H.rows(); ++i)
    for (Eigen::Index j = 0; j < H.cols(); ++j)
      table += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + format_number(H(i, j).real()) + "," +
               format_number(H(i, j).imag()) + "\n";
  write_text(ctx.options.out_dir / "control_hamiltonian.csv", table);
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::solve, Command::oracle, Command::verify, Command::convert, Command::quantum}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::oracle: return "oracle";
    case Command::verify: return "verify";
    case Command::convert: return "convert";
    case Command::quantum: return "quantum";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_homothety: return exit_status::not_homothety;
    case ErrorCode::parse_error:
    case ErrorCode::io_error: return exit_status::parse_error;
    default: return exit_status::numerical_failure;
  }
}

RunReport run_command(Command command, const RunOptions& options) {
  const auto started = Clock::now();
  RunReport report;
  report.command = std::string(to_string(command));
  report.scenario = options.scenario.string();

  auto fail = [&report](ErrorCode code, const std::string& message, int exit_code) {
    report.error_code = to_string(code);
    report.error_message = message;
    report.exit_code = exit_code;
  };

  bool parsed = false;
  try {
    std::filesystem::create_directories(options.out_dir);
    Context ctx{options, parse_scenario(options.scenario), report};
    parsed = true;
    report.digest = fnv1a64(ctx.scenario.content);
    if (options.seed) ctx.scenario.oracle.seed = *options.seed;
    if (options.dt) {
      if (!(*options.dt > 0.0)) throw UsageError(ErrorCode::invalid_input, "--dt must be positive");
      ctx.scenario.solver.ode_dt = *options.dt;
      ctx.scenario.quantum_checks.dt = *options.dt;
    }
    report.settings = describe_settings(ctx.scenario);
    if (options.seed) report.settings.emplace_back("override.seed", std::to_string(*options.seed));
    if (options.dt) report.settings.emplace_back("override.dt", format_number(*options.dt));

    const bool quantum_kind = ctx.scenario.kind == ScenarioKind::quantum;
    if (quantum_kind != (command == Command::quantum)) {
      throw UsageError(ErrorCode::invalid_input, "command '" + report.command + "' does not accept a " +
                                                     (quantum_kind ? "quantum" : "navigation") + " scenario");
    }
    switch (command) {
      case Command::solve: run_solve(ctx); break;
      case Command::oracle: run_oracle(ctx); break;
      case Command::verify: run_verify(ctx); break;
      case Command::convert: run_convert(ctx); break;
      case Command::quantum: run_quantum(ctx); break;
    }
    report.exit_code = report.all_pass() ? exit_status::pass : exit_status::verification_failure;
  } catch (const UsageError& e) {
    fail(e.code(), e.what(), exit_status::parse_error);
  } catch (const Error& e) {
    // Anything raised while reading the scenario is an input problem.
    fail(e.code(), e.what(), parsed ? exit_code_for(e.code()) : exit_status::parse_error);
  } catch (const std::exception& e) {
    fail(ErrorCode::io_error, e.what(), parsed ? exit_status::numerical_failure : exit_status::parse_error);
  }
  report.timing.emplace_back("total_seconds", seconds_since(started));

  try {
    if (std::filesystem::is_directory(options.out_dir)) report.write(options.out_dir / "report.txt");
  } catch (const Error& e) {
    if (report.exit_code == exit_status::pass) fail(e.code(), e.what(), exit_status::parse_error);
  }
  return report;
}

}  // namespace zermelo
