#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dipsqueeze/densela.hpp"

namespace dipsqueeze {

enum class Axis { X, Y, Z };

/// Couplings are entered as d/(2 pi) in MHz; the propagator works in rad/ns.
[[nodiscard]] constexpr double mhz_to_rad_per_ns(double d_over_2pi_mhz) {
  return 2.0 * std::numbers::pi * 1e-3 * d_over_2pi_mhz;
}

/// (mu0 / 4 pi) * h in MHz nm^3 / (GHz/T)^2. With gamma = 28 GHz/T, r = 1 nm,
/// S = 1/2 and the pair along the field this yields 25.97 MHz.
inline constexpr double kDipolarPrefactorMhz = 1e-7 * 6.62607015e-34 * 1e18 * 1e27 * 1e-6;

struct ObservableMode {
  enum class Kind { Collective, SingleSite };

  Kind kind = Kind::Collective;
  int site = 0;  // 1-based, used only for SingleSite

  static ObservableMode collective() { return {}; }
  static ObservableMode single_site(int i) { return {Kind::SingleSite, i}; }

  /// "collective" or "single_site:<i>".
  static ObservableMode parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const ObservableMode&, const ObservableMode&) = default;
};

struct SpinSystemSpec {
  int n_spins = 0;
  Eigen::MatrixXd couplings_mhz;  // symmetric, zero diagonal, d_ij/(2 pi)
  ObservableMode observable_mode;

  /// Throws InvalidN, AsymmetricCouplings or SiteOutOfRange.
  void validate() const;
};

struct GeometrySpec {
  std::vector<Eigen::Vector3d> positions_nm;
  std::vector<double> gyromagnetic_ratios_ghz_per_t;  // empty means 28 GHz/T for every spin
  double spin_magnitude = 0.5;
  Eigen::Vector3d field_axis = Eigen::Vector3d::UnitZ();

  [[nodiscard]] double gamma(int i) const;
  void validate() const;
};

[[nodiscard]] HermitianOperator site_operator(int n, int site, Axis axis);
[[nodiscard]] HermitianOperator collective_operator(int n, Axis axis);

/// Rotating-frame secular dipolar Hamiltonian in rad/ns:
/// sum_{i<j} d_ij [Sz Sz - (Sx Sx + Sy Sy)/2].
[[nodiscard]] HermitianOperator secular_hamiltonian(const SpinSystemSpec& spec);

/// d_ij/(2 pi) in MHz for spins i, j (1-based).
[[nodiscard]] double dipolar_coupling(const GeometrySpec& geom, int i, int j);
[[nodiscard]] Eigen::MatrixXd coupling_matrix(const GeometrySpec& geom);

/// Every spin along +x.
[[nodiscard]] QuantumState coherent_state(int n);

// Matrix-free kernels over a raw amplitude vector of n spins.

/// out = S_axis^site v
void apply_site(const ComplexVector& v, ComplexVector& out, int n, int site, Axis axis);
/// out = J_axis v
void apply_collective(const ComplexVector& v, ComplexVector& out, int n, Axis axis);
/// v <- exp(-i angle S_x^site) v
void rotate_site_x(ComplexVector& v, int n, int site, double angle_rad);

}  // namespace dipsqueeze
