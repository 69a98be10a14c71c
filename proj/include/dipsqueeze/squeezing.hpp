#pragma once

// Pulse-sequence analysis: evolve under the secular Hamiltonian, rotate about
// x by theta, and locate the squeezed quadrature.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "dipsqueeze/densela.hpp"
#include "dipsqueeze/spinmodel.hpp"

namespace dipsqueeze {

struct SweepGrid {
  double tau_start_ns = 0.0;
  double tau_end_ns = 650.0;
  double tau_step_ns = 1.0;
  double theta_start_deg = 0.0;
  double theta_end_deg = 179.0;
  double theta_step_deg = 1.0;

  /// Throws InvalidGrid.
  void validate() const;

  [[nodiscard]] std::size_t tau_count() const;
  [[nodiscard]] double tau_at(std::size_t k) const { return tau_start_ns + tau_step_ns * static_cast<double>(k); }
  [[nodiscard]] std::vector<double> taus() const;
  [[nodiscard]] std::vector<double> thetas_deg() const;

  friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

struct SweepOptions {
  // Local minima of sigma_b(tau) within this of the global minimum count as
  // the same optimum; the earliest of them is reported.
  double tie_tolerance = 1e-4;
  // J below this fraction of its maximum (N/2, or 1/2 per site) is degenerate.
  double degeneracy_fraction = 1e-6;
};

struct EllipseSample {
  double theta_deg;
  double delta_y;
  double delta_z;
};

struct ThetaSweep {
  double delta_b = 0.0;
  double delta_a = 0.0;
  double theta_opt_deg = 0.0;
  std::vector<EllipseSample> samples;
  std::array<double, 3> means{};   // <J_x>, <J_y>, <J_z> of the unrotated state
  double max_mean_drift = 0.0;     // largest |<J_k>_theta - <J_k>| over the grid
  double robertson_margin = 0.0;   // min over theta of dY dZ - |<J_x>|/2
};

struct SqueezingPoint {
  double tau_ns = 0.0;
  std::array<double, 3> j_exp{};
  double j_mag = 0.0;
  double delta_b = 0.0;
  double delta_a = 0.0;
  double theta_opt_deg = 0.0;
  double sigma_b = 0.0;  // NaN when degenerate
  double sigma_a = 0.0;
  std::vector<double> entropy;  // per site
  bool degenerate = false;
  double max_mean_drift = 0.0;
  double robertson_margin = 0.0;
};

struct SweepSummary {
  double sigma_min = 0.0;      // min sigma_b over non-degenerate points
  double sigma_min_raw = 0.0;  // same, including flagged points with J > 0
  double tau_min_ns = 0.0;
  double theta_min_deg = 0.0;
  double sigma_a_min = 0.0;
  double sigma_b_at_tau_min = 0.0;
  double sigma_0 = 0.0;
  int n_spins = 0;
  std::size_t degenerate_points = 0;
  SweepGrid grid;
  ObservableMode observable_mode;
};

struct SweepResult {
  std::vector<SqueezingPoint> points;
  SweepSummary summary;
};

/// exp(-i theta J_x) psi through the eigensystem of J_x.
[[nodiscard]] QuantumState rotate_x(const QuantumState& psi, double theta_deg, const EigenSystem& jx_eig);

/// The same rotation applied as a product of single-site rotations.
[[nodiscard]] QuantumState rotate_x_product(const QuantumState& psi, double theta_deg);

/// Uncertainties of the transverse components for every theta of the grid.
/// Ties in the minimum resolve to the smallest theta.
[[nodiscard]] ThetaSweep theta_sweep(const QuantumState& psi_tau, const SweepGrid& grid,
                                     const ObservableMode& mode = ObservableMode::collective());

[[nodiscard]] SqueezingPoint analyze_tau(const SpectralPropagator& propagator, double tau_ns,
                                         const SweepGrid& grid, const ObservableMode& mode,
                                         const SweepOptions& options = {});

/// Reduces a tau series to the global squeezing optimum. Throws
/// AllPointsDegenerate when no point qualifies.
[[nodiscard]] SweepSummary summarize(const std::vector<SqueezingPoint>& points, int n_spins,
                                     const SweepGrid& grid, const ObservableMode& mode,
                                     const SweepOptions& options = {});

[[nodiscard]] SweepResult tau_sweep(const SpinSystemSpec& spec, const SweepGrid& grid,
                                    const SweepOptions& options = {});

[[nodiscard]] SpectralPropagator make_propagator(const SpinSystemSpec& spec);

struct EntropyTrace {
  std::vector<double> taus_ns;
  std::vector<std::vector<double>> entropies;  // [tau][site]
};

[[nodiscard]] EntropyTrace entropy_trace(const SpinSystemSpec& spec, const SweepGrid& grid);

/// First tau at which any site entropy comes within `tolerance` of ln 2.
[[nodiscard]] std::optional<double> first_plateau_crossing(const EntropyTrace& trace,
                                                           double tolerance = 0.01);

[[nodiscard]] double sql_reference(int n);

}  // namespace dipsqueeze
