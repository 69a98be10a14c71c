#include "dipsqueeze/spinmodel.hpp"

#include <bit>
#include <charconv>
#include <cmath>

namespace dipsqueeze {

namespace {

constexpr double kDefaultGamma = 28.0;

Eigen::Index site_bit(int n, int site) { return Eigen::Index{1} << (n - site); }

void check_site(int n, int site) {
  if (site < 1 || site > n) {
    throw Error(ErrorCode::SiteOutOfRange,
                "site " + std::to_string(site) + " outside 1.." + std::to_string(n));
  }
}

}  // namespace

ObservableMode ObservableMode::parse(std::string_view text) {
  if (text == "collective") return collective();
  constexpr std::string_view prefix = "single_site:";
  if (text.starts_with(prefix)) {
    const std::string_view num = text.substr(prefix.size());
    int site = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), site);
    if (ec == std::errc() && ptr == num.data() + num.size() && site >= 1) return single_site(site);
  }
  throw Error(ErrorCode::ValidationError,
              "observable mode must be 'collective' or 'single_site:<i>', got '" +
                  std::string(text) + "'");
}

std::string ObservableMode::to_string() const {
  return kind == Kind::Collective ? std::string("collective")
                                  : "single_site:" + std::to_string(site);
}

void SpinSystemSpec::validate() const {
  if (n_spins < 1) throw Error(ErrorCode::InvalidN, "n_spins must be at least 1");
  if (couplings_mhz.rows() != n_spins || couplings_mhz.cols() != n_spins) {
    throw Error(ErrorCode::AsymmetricCouplings, "coupling matrix must be n x n");
  }
  for (int i = 0; i < n_spins; ++i) {
    if (couplings_mhz(i, i) != 0.0) {
      throw Error(ErrorCode::AsymmetricCouplings, "coupling matrix diagonal must be zero");
    }
    for (int j = 0; j < n_spins; ++j) {
      if (!std::isfinite(couplings_mhz(i, j))) {
        throw Error(ErrorCode::AsymmetricCouplings, "coupling matrix has a non-finite entry");
      }
      if (couplings_mhz(i, j) != couplings_mhz(j, i)) {
        throw Error(ErrorCode::AsymmetricCouplings,
                    "couplings[" + std::to_string(i) + "][" + std::to_string(j) +
                        "] differs from its transpose");
      }
    }
  }
  if (observable_mode.kind == ObservableMode::Kind::SingleSite) {
    check_site(n_spins, observable_mode.site);
  }
}

double GeometrySpec::gamma(int i) const {
  return gyromagnetic_ratios_ghz_per_t.empty() ? kDefaultGamma
                                               : gyromagnetic_ratios_ghz_per_t.at(i - 1);
}

void GeometrySpec::validate() const {
  if (positions_nm.size() < 2) {
    throw Error(ErrorCode::InvalidGeometry, "geometry needs at least two positions");
  }
  if (!gyromagnetic_ratios_ghz_per_t.empty() &&
      gyromagnetic_ratios_ghz_per_t.size() != positions_nm.size()) {
    throw Error(ErrorCode::InvalidGeometry, "one gyromagnetic ratio per position is required");
  }
  if (std::abs(field_axis.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidGeometry, "field axis must be a unit vector");
  }
  for (std::size_t i = 0; i < positions_nm.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_nm.size(); ++j) {
      if ((positions_nm[i] - positions_nm[j]).norm() <= 0.0) {
        throw Error(ErrorCode::CoincidentPositions, "spins " + std::to_string(i + 1) + " and " +
                                                        std::to_string(j + 1) + " coincide");
      }
    }
  }
}

HermitianOperator site_operator(int n, int site, Axis axis) {
  const Eigen::Index dim = hilbert_dim(n);
  check_site(n, site);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    ComplexVector e = ComplexVector::Zero(dim);
    e[col] = 1.0;
    ComplexVector out(dim);
    apply_site(e, out, n, site, axis);
    m.col(col) = out;
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator collective_operator(int n, Axis axis) {
  const Eigen::Index dim = hilbert_dim(n);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    ComplexVector e = ComplexVector::Zero(dim);
    e[col] = 1.0;
    ComplexVector out(dim);
    apply_collective(e, out, n, axis);
    m.col(col) = out;
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator secular_hamiltonian(const SpinSystemSpec& spec) {
  spec.validate();
  const int n = spec.n_spins;
  const Eigen::Index dim = hilbert_dim(n);
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double d = mhz_to_rad_per_ns(spec.couplings_mhz(i - 1, j - 1));
      if (d == 0.0) continue;
      const Eigen::Index bi = site_bit(n, i);
      const Eigen::Index bj = site_bit(n, j);
      for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const bool same = ((idx & bi) != 0) == ((idx & bj) != 0);
        // Ising part: Sz Sz = +1/4 for aligned pairs, -1/4 otherwise.
        h(idx, idx) += same ? 0.25 * d : -0.25 * d;
        // Flip-flop: -(S+S- + S-S+)/4 exchanges antiparallel pairs.
        if (!same) h(idx ^ bi ^ bj, idx) += -0.25 * d;
      }
    }
  }
  return HermitianOperator(std::move(h));
}

double dipolar_coupling(const GeometrySpec& geom, int i, int j) {
  geom.validate();
  const int n = static_cast<int>(geom.positions_nm.size());
  check_site(n, i);
  check_site(n, j);
  if (i == j) throw Error(ErrorCode::CoincidentPositions, "a spin does not couple to itself");
  const Eigen::Vector3d r = geom.positions_nm[j - 1] - geom.positions_nm[i - 1];
  const double r2 = r.squaredNorm();
  const double dist = std::sqrt(r2);
  const double b2 = geom.field_axis.squaredNorm();
  const double rb = r.dot(geom.field_axis);
  // 3cos^2 - 1 without the square root, so lattice magic-angle pairs give exactly zero.
  const double angular = (3.0 * rb * rb - r2 * b2) / (r2 * b2);
  const double s2 = geom.spin_magnitude * geom.spin_magnitude;
  return kDipolarPrefactorMhz * geom.gamma(i) * geom.gamma(j) * s2 * angular / (r2 * dist);
}

Eigen::MatrixXd coupling_matrix(const GeometrySpec& geom) {
  geom.validate();
  const int n = static_cast<int>(geom.positions_nm.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      d(i - 1, j - 1) = d(j - 1, i - 1) = dipolar_coupling(geom, i, j);
    }
  }
  return d;
}

QuantumState coherent_state(int n) {
  const Eigen::Index dim = hilbert_dim(n);
  return QuantumState(ComplexVector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))), n);
}

void apply_site(const ComplexVector& v, ComplexVector& out, int n, int site, Axis axis) {
  check_site(n, site);
  const Eigen::Index dim = v.size();
  const Eigen::Index bit = site_bit(n, site);
  out.resize(dim);
  constexpr Complex half_i{0.0, 0.5};
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    const bool down = (idx & bit) != 0;
    switch (axis) {
      case Axis::X: out[idx] = 0.5 * v[idx ^ bit]; break;
      // sigma_y/2: <0|.|1> = -i/2, <1|.|0> = +i/2
      case Axis::Y: out[idx] = (down ? half_i : -half_i) * v[idx ^ bit]; break;
      case Axis::Z: out[idx] = (down ? -0.5 : 0.5) * v[idx]; break;
    }
  }
}

void apply_collective(const ComplexVector& v, ComplexVector& out, int n, Axis axis) {
  const Eigen::Index dim = v.size();
  out = ComplexVector::Zero(dim);
  if (axis == Axis::Z) {
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      const int downs = std::popcount(static_cast<unsigned long long>(idx));
      out[idx] = 0.5 * static_cast<double>(n - 2 * downs) * v[idx];
    }
    return;
  }
  constexpr Complex half_i{0.0, 0.5};
  for (int site = 1; site <= n; ++site) {
    const Eigen::Index bit = site_bit(n, site);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      if (axis == Axis::X) {
        out[idx] += 0.5 * v[idx ^ bit];
      } else {
        out[idx] += ((idx & bit) ? half_i : -half_i) * v[idx ^ bit];
      }
    }
  }
}

void rotate_site_x(ComplexVector& v, int n, int site, double angle_rad) {
  check_site(n, site);
  const Eigen::Index bit = site_bit(n, site);
  // exp(-i a sigma_x / 2) = cos(a/2) I - i sin(a/2) sigma_x
  const double c = std::cos(0.5 * angle_rad);
  const Complex mis{0.0, -std::sin(0.5 * angle_rad)};
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    if (idx & bit) continue;
    const Complex up = v[idx];
    const Complex down = v[idx | bit];
    v[idx] = c * up + mis * down;
    v[idx | bit] = mis * up + c * down;
  }
}

}  // namespace dipsqueeze
