#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dipsqueeze/squeezing.hpp"

namespace dipsqueeze {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalError = 2;

struct Table1Row {
  int n_spins;
  double j;  // N/2
  double sigma_0;
  double sigma_min;
  double tau_min_ns;
  double theta_min_deg;
  double ratio;  // sigma_min / sigma_0
};

/// Uniform sweeps for N = 2..n_max over the default uniform grid.
[[nodiscard]] std::vector<Table1Row> table1(double d_mhz, int n_max, const SweepGrid& grid);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dipsqueeze
