#include "dipsqueeze/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dipsqueeze {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

// Rounds through the printed representation so JSON output carries the same
// six significant digits as the CSV files.
double rounded(double value) {
  if (!std::isfinite(value)) return value;
  return std::stod(format_number(value));
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

std::vector<std::string> timeseries_header(int n_spins) {
  std::vector<std::string> h = {"tau_ns", "jx", "jy", "jz", "j_mag", "delta_b",
                                "delta_a", "theta_opt_deg", "sigma_b", "sigma_a"};
  for (int i = 1; i <= n_spins; ++i) h.push_back("entropy_" + std::to_string(i));
  h.push_back("degenerate");
  return h;
}

void write_timeseries(const std::vector<SqueezingPoint>& points, const std::filesystem::path& path) {
  if (points.empty()) throw Error(ErrorCode::IoError, "refusing to write an empty time series");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].tau_ns > points[k - 1].tau_ns)) {
      throw Error(ErrorCode::IoError, "time series rows must be strictly increasing in tau");
    }
  }
  const int n = static_cast<int>(points.front().entropy.size());
  auto out = open_output(path);
  write_row(out, timeseries_header(n));
  for (const auto& p : points) {
    std::vector<std::string> cells = {
        format_number(p.tau_ns), format_number(p.j_exp[0]), format_number(p.j_exp[1]),
        format_number(p.j_exp[2]), format_number(p.j_mag), format_number(p.delta_b),
        format_number(p.delta_a), format_number(p.theta_opt_deg), format_number(p.sigma_b),
        format_number(p.sigma_a)};
    for (double s : p.entropy) cells.push_back(format_number(s));
    cells.push_back(p.degenerate ? "1" : "0");
    write_row(out, cells);
  }
  finish(out, path);
}

void write_summary(const SweepSummary& s, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["sigma_min"] = rounded(s.sigma_min);
  doc["sigma_min_raw"] = rounded(s.sigma_min_raw);
  doc["tau_min_ns"] = rounded(s.tau_min_ns);
  doc["theta_min_deg"] = rounded(s.theta_min_deg);
  doc["sigma_a_min"] = rounded(s.sigma_a_min);
  doc["sigma_b_at_tau_min"] = rounded(s.sigma_b_at_tau_min);
  doc["sigma_0"] = rounded(s.sigma_0);
  doc["n_spins"] = s.n_spins;
  doc["mode"] = s.observable_mode.to_string();
  doc["degenerate_points"] = s.degenerate_points;
  doc["grid"] = {
      {"tau_start_ns", rounded(s.grid.tau_start_ns)},     {"tau_end_ns", rounded(s.grid.tau_end_ns)},
      {"tau_step_ns", rounded(s.grid.tau_step_ns)},       {"theta_start_deg", rounded(s.grid.theta_start_deg)},
      {"theta_end_deg", rounded(s.grid.theta_end_deg)},   {"theta_step_deg", rounded(s.grid.theta_step_deg)}};
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_ellipse(const std::vector<EllipseSample>& samples, double j_mag,
                   const std::filesystem::path& path) {
  if (samples.empty()) throw Error(ErrorCode::IoError, "refusing to write an empty ellipse");
  if (!(j_mag > 0.0)) throw Error(ErrorCode::IoError, "ellipse normalization needs J > 0");
  auto out = open_output(path);
  write_row(out, {"theta_deg", "sigma_y", "sigma_z"});
  for (const auto& e : samples) {
    write_row(out, {format_number(e.theta_deg), format_number(e.delta_y / j_mag),
                    format_number(e.delta_z / j_mag)});
  }
  finish(out, path);
}

void write_entropy_trace(const EntropyTrace& trace, const std::filesystem::path& path) {
  if (trace.taus_ns.empty()) throw Error(ErrorCode::IoError, "refusing to write an empty entropy trace");
  const std::size_t n = trace.entropies.front().size();
  auto out = open_output(path);
  std::vector<std::string> header = {"tau_ns"};
  for (std::size_t i = 1; i <= n; ++i) header.push_back("entropy_" + std::to_string(i));
  write_row(out, header);
  for (std::size_t k = 0; k < trace.taus_ns.size(); ++k) {
    std::vector<std::string> cells = {format_number(trace.taus_ns[k])};
    for (double s : trace.entropies[k]) cells.push_back(format_number(s));
    write_row(out, cells);
  }
  finish(out, path);
}

std::string ellipse_filename(double tau_ns) { return "ellipse_tau" + format_number(tau_ns) + ".csv"; }

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "'" + path.string() + "' is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) table.rows.push_back(split(line));
  }
  return table;
}

}  // namespace dipsqueeze
