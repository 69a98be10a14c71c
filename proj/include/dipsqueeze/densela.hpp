#pragma once

// Dense complex linear algebra for Hilbert spaces of a few spin-1/2 sites.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "dipsqueeze/error.hpp"

namespace dipsqueeze {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kImaginaryResidueLimit = 1e-8;
inline constexpr double kVarianceClamp = 1e-12;

/// Hilbert-space dimension 2^n.
[[nodiscard]] Eigen::Index hilbert_dim(int n_spins);

/// Unit-norm state vector of `n_spins` qubits. Site 1 is the most significant
/// bit of the basis index and |0> is spin up.
class QuantumState {
 public:
  QuantumState(ComplexVector amplitudes, int n_spins);

  /// Rescales to unit norm before validating; used after numerically lossy steps.
  static QuantumState normalized(ComplexVector amplitudes, int n_spins);

  [[nodiscard]] const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] int n_spins() const noexcept { return n_spins_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return amplitudes_.size(); }

 private:
  ComplexVector amplitudes_;
  int n_spins_;
};

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix matrix);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

struct EigenSystem {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix matrix);

  static DensityMatrix from_pure(const QuantumState& psi);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

[[nodiscard]] bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance);

[[nodiscard]] ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Throws NonHermitianInput when `h` is not Hermitian within 1e-12.
[[nodiscard]] EigenSystem eig_hermitian(const ComplexMatrix& h);
[[nodiscard]] EigenSystem eig_hermitian(const HermitianOperator& h);

/// V diag(lambda) V^dagger.
[[nodiscard]] ComplexMatrix reconstruct(const EigenSystem& eig);

/// exp(-i H tau) psi0 for the Hamiltonian whose spectrum is `eig`.
[[nodiscard]] QuantumState evolve(const QuantumState& psi0, const EigenSystem& eig, double tau);

/// Caches the eigenbasis coefficients of a fixed initial state so that each
/// propagation step costs one matrix-vector product.
class SpectralPropagator {
 public:
  SpectralPropagator(EigenSystem eig, const QuantumState& psi0);

  [[nodiscard]] QuantumState state_at(double tau) const;
  [[nodiscard]] const EigenSystem& eigensystem() const noexcept { return eig_; }

 private:
  EigenSystem eig_;
  ComplexVector coefficients_;
  int n_spins_;
};

[[nodiscard]] double expectation(const QuantumState& psi, const HermitianOperator& a);
[[nodiscard]] double uncertainty(const QuantumState& psi, const HermitianOperator& a);

/// sqrt(variance) with the round-off clamp applied; throws NegativeVariance
/// below -1e-12.
[[nodiscard]] double checked_sqrt_variance(double variance);

/// Reduced 2x2 density matrix of `site` (1-based) of an n-spin density matrix.
[[nodiscard]] DensityMatrix partial_trace_site(const DensityMatrix& rho, int site, int n_spins);

/// Same reduction taken directly from a pure state in O(2^n).
[[nodiscard]] DensityMatrix reduced_site_density(const QuantumState& psi, int site);

/// -Tr(rho ln rho), with 0 ln 0 = 0.
[[nodiscard]] double von_neumann_entropy(const DensityMatrix& rho);

}  // namespace dipsqueeze
