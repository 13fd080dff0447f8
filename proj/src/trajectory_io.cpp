#include "zermelo/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zermelo/report.hpp"

namespace zermelo {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    fields.push_back(line.substr(begin, comma - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return fields;
}

}  // namespace

std::string render_trajectory(const Trajectory& traj, const ZermeloData& z) {
  const int n = traj.dimension();
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= n; ++i) out += ",v" + std::to_string(i);
  out += ",F\n";
  for (const Sample& s : traj.samples) {
    out += format_number(s.t);
    for (int i = 0; i < n; ++i) out += "," + format_number(s.x[i]);
    for (int i = 0; i < n; ++i) out += "," + format_number(s.v[i]);
    double F = std::nan("");
    try {
      F = finsler_function(z, s.x, s.v);
    } catch (const Error&) {
    }
    out += "," + format_number(F) + "\n";
  }
  return out;
}

void export_trajectory(const Trajectory& traj, const ZermeloData& z, const std::filesystem::path& path) {
  const std::string text = render_trajectory(traj, z);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write trajectory " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "failed writing trajectory " + path.string());
}

Trajectory parse_trajectory(const std::string& text, Parameterization tag, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  auto fail = [&](int line_no, const std::string& what) -> void {
    throw Error(ErrorCode::parse_error, source + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) fail(1, "empty trajectory file");
  const auto header = split_commas(line);
  if (header.size() < 4 || (header.size() - 2) % 2 != 0 || header.front() != "t" || header.back() != "F") {
    fail(1, "header must be t,x1..xn,v1..vn,F");
  }
  const int n = static_cast<int>(header.size() - 2) / 2;
  for (int i = 1; i <= n; ++i) {
    if (header[i] != "x" + std::to_string(i) || header[n + i] != "v" + std::to_string(i)) {
      fail(1, "header must be t,x1..xn,v1..vn,F");
    }
  }

  Trajectory traj;
  traj.tag = tag;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) fail(line_no, "blank line");
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) fail(line_no, "expected " + std::to_string(header.size()) + " fields");
    std::vector<double> values(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::string& f = fields[k];
      const bool last = k + 1 == fields.size();
      if (last && f == "nan") {
        values[k] = std::nan("");
        continue;
      }
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(values[k])) {
        fail(line_no, "field " + std::to_string(k + 1) + " ('" + f + "') is not a finite number");
      }
    }
    Sample s{values[0], Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
      s.x[i] = values[1 + i];
      s.v[i] = values[1 + n + i];
    }
    traj.samples.push_back(std::move(s));
  }
  try {
    validate(traj);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, source + ": " + e.what());
  }
  return traj;
}

Trajectory import_trajectory(const std::filesystem::path& path, Parameterization tag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open trajectory " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trajectory(buffer.str(), tag, path.string());
}

}  // namespace zermelo
