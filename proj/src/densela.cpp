#include "dipsqueeze/densela.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dipsqueeze {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonRealExpectation: return "NonRealExpectation";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::SiteOutOfRange: return "SiteOutOfRange";
    case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::AsymmetricCouplings: return "AsymmetricCouplings";
    case ErrorCode::CoincidentPositions: return "CoincidentPositions";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::AllPointsDegenerate: return "AllPointsDegenerate";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Eigen::Index hilbert_dim(int n_spins) {
  if (n_spins < 1 || n_spins > 30) {
    throw Error(ErrorCode::InvalidN, "spin count " + std::to_string(n_spins) + " out of range");
  }
  return Eigen::Index{1} << n_spins;
}

QuantumState::QuantumState(ComplexVector amplitudes, int n_spins)
    : amplitudes_(std::move(amplitudes)), n_spins_(n_spins) {
  if (amplitudes_.size() != hilbert_dim(n_spins_)) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension is not 2^" + std::to_string(n_spins_));
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "state norm " << norm << " differs from 1";
    throw Error(ErrorCode::InvalidState, os.str());
  }
}

QuantumState QuantumState::normalized(ComplexVector amplitudes, int n_spins) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidState, "cannot normalize a zero or non-finite vector");
  }
  amplitudes /= norm;
  return QuantumState(std::move(amplitudes), n_spins);
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "operator matrix is not square");
  }
  if (!is_hermitian(matrix_)) {
    throw Error(ErrorCode::NonHermitianInput, "operator matrix is not Hermitian");
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(ErrorCode::InvalidDensityMatrix, "density matrix is not square");
  }
  if (!is_hermitian(matrix_)) {
    throw Error(ErrorCode::InvalidDensityMatrix, "density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > 1e-10) {
    throw Error(ErrorCode::InvalidDensityMatrix, "density matrix trace differs from 1");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorCode::InvalidDensityMatrix, "density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::from_pure(const QuantumState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

EigenSystem eig_hermitian(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
  }
  if (!is_hermitian(h)) {
    throw Error(ErrorCode::NonHermitianInput, "eigendecomposition input is not Hermitian");
  }
  // Real symmetric input (the secular Hamiltonian in the z basis) takes the
  // cheaper real solver.
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::NonHermitianInput, "symmetric eigensolver did not converge");
    }
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors().cast<Complex>()};
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonHermitianInput, "Hermitian eigensolver did not converge");
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem eig_hermitian(const HermitianOperator& h) { return eig_hermitian(h.matrix()); }

ComplexMatrix reconstruct(const EigenSystem& eig) {
  return eig.eigenvectors * eig.eigenvalues.cast<Complex>().asDiagonal() *
         eig.eigenvectors.adjoint();
}

namespace {

ComplexVector phase_factors(const RealVector& eigenvalues, double tau) {
  ComplexVector phases(eigenvalues.size());
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    phases[k] = std::polar(1.0, -eigenvalues[k] * tau);
  }
  return phases;
}

void check_dims(const EigenSystem& eig, Eigen::Index dim) {
  if (eig.eigenvectors.rows() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "eigensystem and state dimensions differ");
  }
}

}  // namespace

QuantumState evolve(const QuantumState& psi0, const EigenSystem& eig, double tau) {
  check_dims(eig, psi0.dim());
  ComplexVector c = eig.eigenvectors.adjoint() * psi0.amplitudes();
  c.array() *= phase_factors(eig.eigenvalues, tau).array();
  return QuantumState(eig.eigenvectors * c, psi0.n_spins());
}

SpectralPropagator::SpectralPropagator(EigenSystem eig, const QuantumState& psi0)
    : eig_(std::move(eig)), n_spins_(psi0.n_spins()) {
  check_dims(eig_, psi0.dim());
  coefficients_ = eig_.eigenvectors.adjoint() * psi0.amplitudes();
}

QuantumState SpectralPropagator::state_at(double tau) const {
  ComplexVector c = coefficients_.array() * phase_factors(eig_.eigenvalues, tau).array();
  return QuantumState(eig_.eigenvectors * c, n_spins_);
}

double expectation(const QuantumState& psi, const HermitianOperator& a) {
  if (a.dim() != psi.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  const Complex value = psi.amplitudes().dot(a.matrix() * psi.amplitudes());
  if (std::abs(value.imag()) > kImaginaryResidueLimit) {
    throw Error(ErrorCode::NonRealExpectation, "expectation value has a significant imaginary part");
  }
  return value.real();
}

double checked_sqrt_variance(double variance) {
  if (variance < -kVarianceClamp) {
    std::ostringstream os;
    os << "variance " << variance << " is negative beyond round-off";
    throw Error(ErrorCode::NegativeVariance, os.str());
  }
  return variance <= 0.0 ? 0.0 : std::sqrt(variance);
}

double uncertainty(const QuantumState& psi, const HermitianOperator& a) {
  if (a.dim() != psi.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  const ComplexVector a_psi = a.matrix() * psi.amplitudes();
  const double mean = expectation(psi, a);
  const double second = a_psi.squaredNorm();  // <psi|A^2|psi> for Hermitian A
  return checked_sqrt_variance(second - mean * mean);
}

DensityMatrix partial_trace_site(const DensityMatrix& rho, int site, int n_spins) {
  const Eigen::Index dim = hilbert_dim(n_spins);
  if (site < 1 || site > n_spins) {
    throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site) + " outside 1.." +
                                               std::to_string(n_spins));
  }
  if (rho.dim() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "density matrix dimension is not 2^n");
  }
  const Eigen::Index bit = Eigen::Index{1} << (n_spins - site);
  ComplexMatrix reduced = ComplexMatrix::Zero(2, 2);
  const ComplexMatrix& m = rho.matrix();
  // Sum over the environment index with the site bit cleared.
  for (Eigen::Index env = 0; env < dim; ++env) {
    if (env & bit) continue;
    const Eigen::Index idx[2] = {env, env | bit};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) reduced(a, b) += m(idx[a], idx[b]);
    }
  }
  return DensityMatrix(std::move(reduced));
}

DensityMatrix reduced_site_density(const QuantumState& psi, int site) {
  const int n = psi.n_spins();
  if (site < 1 || site > n) {
    throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site) + " outside 1.." +
                                               std::to_string(n));
  }
  const Eigen::Index bit = Eigen::Index{1} << (n - site);
  const ComplexVector& v = psi.amplitudes();
  Complex r00{}, r01{}, r11{};
  for (Eigen::Index env = 0; env < psi.dim(); ++env) {
    if (env & bit) continue;
    const Complex up = v[env];
    const Complex down = v[env | bit];
    r00 += std::norm(up);
    r11 += std::norm(down);
    r01 += up * std::conj(down);
  }
  ComplexMatrix reduced(2, 2);
  reduced << r00, r01, std::conj(r01), r11;
  return DensityMatrix(std::move(reduced));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (const double lambda : solver.eigenvalues()) {
    if (lambda > 0.0) entropy -= lambda * std::log(lambda);
  }
  return entropy > 0.0 ? entropy : 0.0;
}

}  // namespace dipsqueeze
