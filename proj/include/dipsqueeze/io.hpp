#pragma once

// CSV and JSON writers for sweep results. Numbers are printed with six
// significant digits and '.' as the decimal separator.

#include <filesystem>
#include <string>
#include <vector>

#include "dipsqueeze/squeezing.hpp"

namespace dipsqueeze {

[[nodiscard]] std::string format_number(double value);

/// tau_ns, jx, jy, jz, j_mag, delta_b, delta_a, theta_opt_deg, sigma_b,
/// sigma_a, entropy_1..entropy_N, degenerate
[[nodiscard]] std::vector<std::string> timeseries_header(int n_spins);

void write_timeseries(const std::vector<SqueezingPoint>& points, const std::filesystem::path& path);
void write_summary(const SweepSummary& summary, const std::filesystem::path& path);

/// Rows of (theta_deg, sigma_y, sigma_z): the uncertainties normalized by `j_mag`.
void write_ellipse(const std::vector<EllipseSample>& samples, double j_mag,
                   const std::filesystem::path& path);

void write_entropy_trace(const EntropyTrace& trace, const std::filesystem::path& path);

/// "ellipse_tau<tau>.csv"
[[nodiscard]] std::string ellipse_filename(double tau_ns);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace dipsqueeze
