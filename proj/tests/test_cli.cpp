#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path data_dir = ZERMELO_TEST_DATA;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "zermelo_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int nav(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(NAV_BINARY) + " " + args + " --out " + out.string() + " > " +
                          (out / "stdout.txt").string() + " 2> " + (out / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Value of "key = value" within a report section.
std::string report_value(const std::string& report, const std::string& section, const std::string& key) {
  const auto start = report.find("[" + section + "]\n");
  if (start == std::string::npos) return {};
  std::istringstream lines(report.substr(start));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line) && !line.starts_with("[")) {
    if (line.starts_with(key + " = ")) return line.substr(key.size() + 3);
  }
  return {};
}

double metric(const fs::path& out, const std::string& key) {
  const std::string v = report_value(read_file(out / "report.txt"), "metrics", key);
  return v.empty() ? std::nan("") : std::stod(v);
}

std::vector<std::vector<double>> read_csv(const fs::path& path, std::string& header) {
  std::ifstream in(path);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line, cell;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    rows.emplace_back();
    while (std::getline(fields, cell, ',')) rows.back().push_back(std::stod(cell));
  }
  return rows;
}

std::string without_timing(const std::string& report) { return report.substr(0, report.find("[timing]")); }

}  // namespace

TEST(Cli, SolveDownwind) {
  const fs::path out = fresh_dir("solve");
  ASSERT_EQ(nav("solve --scenario " + (data_dir / "downwind.scn").string(), out), 0);
  EXPECT_NEAR(metric(out, "T"), 2.0 / 3.0, 1e-6);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(out / "frame_curve.csv"));
  const std::string report = read_file(out / "report.txt");
  EXPECT_EQ(report_value(report, "run", "status"), "pass");
  EXPECT_EQ(report, read_file(out / "stdout.txt"));
}

TEST(Cli, VerifyRejectsTamperedTrajectory) {
  const fs::path out = fresh_dir("tamper");
  ASSERT_EQ(nav("solve --scenario " + (data_dir / "downwind.scn").string(), out), 0);
  std::string header;
  auto rows = read_csv(out / "trajectory.csv", header);
  const double T = rows.back()[0];
  std::ofstream bent(out / "bent.csv");
  bent.precision(17);
  bent << header << '\n';
  for (auto& r : rows) {
    r[2] += 0.02 * std::sin(std::numbers::pi * r[0] / T);
    r[4] += 0.02 * std::numbers::pi / T * std::cos(std::numbers::pi * r[0] / T);
    bent << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << ",nan\n";
  }
  bent.close();
  const int code = nav("verify --scenario " + (data_dir / "downwind.scn").string() + " --trajectory " +
                           (out / "bent.csv").string(),
                       out);
  EXPECT_EQ(code, 2);
  const std::string flag = report_value(read_file(out / "report.txt"), "flags", "geodesic_residual");
  EXPECT_TRUE(flag.starts_with("fail")) << flag;
}

TEST(Cli, VerifyAcceptsSolverOutput) {
  const fs::path out = fresh_dir("verify");
  ASSERT_EQ(nav("solve --scenario " + (data_dir / "downwind.scn").string(), out), 0);
  EXPECT_EQ(nav("verify --scenario " + (data_dir / "downwind.scn").string(), out), 0);
  EXPECT_LE(std::abs(metric(out, "oracle_gap")), 5e-3);
}

TEST(Cli, ConvertStillAir) {
  const fs::path out = fresh_dir("convert");
  ASSERT_EQ(nav("convert --scenario " + (data_dir / "still_air.scn").string(), out), 0);
  std::string header;
  const auto rows = read_csv(out / "randers_table.csv", header);
  EXPECT_EQ(header, "x1,x2,alpha11,alpha12,alpha21,alpha22,beta1,beta2,wind_norm,roundtrip_error");
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& r : rows) {
    EXPECT_EQ(r[2], 1.0);
    EXPECT_EQ(r[3], 0.0);
    EXPECT_EQ(r[4], 0.0);
    EXPECT_EQ(r[5], 1.0);
    EXPECT_EQ(r[6], 0.0);
    EXPECT_EQ(r[7], 0.0);
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(nav("solve --scenario " + (data_dir / "nonhomothetic.scn").string(), fresh_dir("nonhom")), 3);
  EXPECT_EQ(nav("solve --scenario " + (data_dir / "too_strong.scn").string(), fresh_dir("strong")), 4);
  const fs::path nh = fresh_dir("nonherm");
  EXPECT_EQ(nav("quantum --scenario " + (data_dir / "non_hermitian.scn").string(), nh), 4);
  EXPECT_NE(read_file(nh / "stderr.txt").find("entry"), std::string::npos);
  EXPECT_EQ(nav("quantum --scenario " + (data_dir / "downwind.scn").string(), fresh_dir("kind")), 4);
  EXPECT_EQ(nav("solve --scenario " + (data_dir / "missing.scn").string(), fresh_dir("missing")), 4);
  EXPECT_EQ(nav("launch --scenario " + (data_dir / "downwind.scn").string(), fresh_dir("usage")), 4);
}

TEST(Cli, Quantum) {
  const fs::path out = fresh_dir("quantum");
  ASSERT_EQ(nav("quantum --scenario " + (data_dir / "qubit.scn").string(), out), 0);
  EXPECT_NEAR(metric(out, "T"), 0.8, 1e-7);
  EXPECT_TRUE(fs::exists(out / "control_hamiltonian.csv"));
}

TEST(Cli, SameSeedIsReproducible) {
  const fs::path a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  const std::string args = "oracle --scenario " + (data_dir / "downwind.scn").string() + " --seed 11";
  ASSERT_EQ(nav(args, a), 0);
  ASSERT_EQ(nav(args, b), 0);
  EXPECT_EQ(without_timing(read_file(a / "report.txt")), without_timing(read_file(b / "report.txt")));
  EXPECT_EQ(read_file(a / "oracle_trajectory.csv"), read_file(b / "oracle_trajectory.csv"));
}
