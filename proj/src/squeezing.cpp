#include "dipsqueeze/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dipsqueeze {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kThetaTieTolerance = 1e-12;

std::size_t grid_count(double start, double end, double step) {
  if (!(step > 0.0) || end < start) return 0;
  return static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
}

// Applies the three observables of `mode` to a state vector and accumulates
// means and second moments.
class ObservableKernel {
 public:
  ObservableKernel(int n, ObservableMode mode) : n_(n), mode_(mode) {}

  struct Moments {
    std::array<double, 3> mean;
    double var_y;
    double var_z;
  };

  Moments measure(const ComplexVector& v) {
    Moments m{};
    const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
    for (int k = 0; k < 3; ++k) {
      if (mode_.kind == ObservableMode::Kind::Collective) {
        apply_collective(v, buffer_, n_, axes[k]);
      } else {
        apply_site(v, buffer_, n_, mode_.site, axes[k]);
      }
      // The imaginary part vanishes for Hermitian observables.
      const double mean = v.dot(buffer_).real();
      m.mean[k] = mean;
      if (k == 1) m.var_y = buffer_.squaredNorm() - mean * mean;
      if (k == 2) m.var_z = buffer_.squaredNorm() - mean * mean;
    }
    return m;
  }

 private:
  int n_;
  ObservableMode mode_;
  ComplexVector buffer_;
};

}  // namespace

void SweepGrid::validate() const {
  const double values[] = {tau_start_ns, tau_end_ns, tau_step_ns,
                           theta_start_deg, theta_end_deg, theta_step_deg};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGrid, "grid values must be finite");
  }
  if (tau_step_ns <= 0.0 || theta_step_deg <= 0.0) {
    throw Error(ErrorCode::InvalidGrid, "grid steps must be positive");
  }
  if (tau_start_ns < 0.0) throw Error(ErrorCode::InvalidGrid, "tau must be non-negative");
  if (tau_end_ns < tau_start_ns || theta_end_deg < theta_start_deg) {
    throw Error(ErrorCode::InvalidGrid, "grid end precedes start");
  }
  if (theta_start_deg > 0.0 || theta_end_deg + theta_step_deg < 180.0 - 1e-9) {
    throw Error(ErrorCode::InvalidGrid, "theta grid must cover [0, 180) degrees");
  }
}

std::size_t SweepGrid::tau_count() const {
  return grid_count(tau_start_ns, tau_end_ns, tau_step_ns);
}

std::vector<double> SweepGrid::taus() const {
  std::vector<double> out(tau_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = tau_at(k);
  return out;
}

std::vector<double> SweepGrid::thetas_deg() const {
  const std::size_t count = grid_count(theta_start_deg, theta_end_deg, theta_step_deg);
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = theta_start_deg + theta_step_deg * static_cast<double>(k);
  }
  return out;
}

QuantumState rotate_x(const QuantumState& psi, double theta_deg, const EigenSystem& jx_eig) {
  return evolve(psi, jx_eig, theta_deg * kDegToRad);
}

QuantumState rotate_x_product(const QuantumState& psi, double theta_deg) {
  ComplexVector v = psi.amplitudes();
  for (int site = 1; site <= psi.n_spins(); ++site) {
    rotate_site_x(v, psi.n_spins(), site, theta_deg * kDegToRad);
  }
  return QuantumState(std::move(v), psi.n_spins());
}

ThetaSweep theta_sweep(const QuantumState& psi_tau, const SweepGrid& grid, const ObservableMode& mode) {
  const std::vector<double> thetas = grid.thetas_deg();
  if (thetas.empty()) throw Error(ErrorCode::EmptyGrid, "theta grid is empty");
  const int n = psi_tau.n_spins();
  if (mode.kind == ObservableMode::Kind::SingleSite && (mode.site < 1 || mode.site > n)) {
    throw Error(ErrorCode::SiteOutOfRange, "observable site outside the system");
  }

  ObservableKernel kernel(n, mode);
  ThetaSweep out;
  out.means = kernel.measure(psi_tau.amplitudes()).mean;
  out.samples.reserve(thetas.size());
  out.robertson_margin = std::numeric_limits<double>::infinity();

  ComplexVector rotated(psi_tau.dim());
  bool first = true;
  for (const double theta : thetas) {
    rotated = psi_tau.amplitudes();
    for (int site = 1; site <= n; ++site) rotate_site_x(rotated, n, site, theta * kDegToRad);

    const auto m = kernel.measure(rotated);
    const double dy = checked_sqrt_variance(m.var_y);
    const double dz = checked_sqrt_variance(m.var_z);
    out.samples.push_back({theta, dy, dz});

    for (int k = 0; k < 3; ++k) {
      out.max_mean_drift = std::max(out.max_mean_drift, std::abs(m.mean[k] - out.means[k]));
    }
    out.robertson_margin = std::min(out.robertson_margin, dy * dz - 0.5 * std::abs(m.mean[0]));

    if (first || dy < out.delta_b - kThetaTieTolerance) {
      out.delta_b = dy;
      out.delta_a = dz;
      out.theta_opt_deg = theta;
      first = false;
    }
  }
  return out;
}

SqueezingPoint analyze_tau(const SpectralPropagator& propagator, double tau_ns, const SweepGrid& grid,
                           const ObservableMode& mode, const SweepOptions& options) {
  const QuantumState psi = propagator.state_at(tau_ns);
  const int n = psi.n_spins();
  const ThetaSweep sweep = theta_sweep(psi, grid, mode);

  SqueezingPoint p;
  p.tau_ns = tau_ns;
  p.j_exp = sweep.means;
  p.j_mag = std::sqrt(p.j_exp[0] * p.j_exp[0] + p.j_exp[1] * p.j_exp[1] + p.j_exp[2] * p.j_exp[2]);
  p.delta_b = sweep.delta_b;
  p.delta_a = sweep.delta_a;
  p.theta_opt_deg = sweep.theta_opt_deg;
  p.max_mean_drift = sweep.max_mean_drift;
  p.robertson_margin = sweep.robertson_margin;

  const double j_scale = mode.kind == ObservableMode::Kind::Collective ? 0.5 * n : 0.5;
  p.degenerate = p.j_mag < options.degeneracy_fraction * j_scale;
  if (p.degenerate) {
    p.sigma_b = p.sigma_a = std::numeric_limits<double>::quiet_NaN();
  } else {
    p.sigma_b = p.delta_b / p.j_mag;
    p.sigma_a = p.delta_a / p.j_mag;
  }

  p.entropy.resize(static_cast<std::size_t>(n));
  for (int site = 1; site <= n; ++site) {
    p.entropy[static_cast<std::size_t>(site - 1)] = von_neumann_entropy(reduced_site_density(psi, site));
  }
  return p;
}

SweepSummary summarize(const std::vector<SqueezingPoint>& points, int n_spins, const SweepGrid& grid,
                       const ObservableMode& mode, const SweepOptions& options) {
  SweepSummary s;
  s.n_spins = n_spins;
  s.grid = grid;
  s.observable_mode = mode;
  s.sigma_0 = sql_reference(n_spins);

  double best = std::numeric_limits<double>::infinity();
  double raw = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.degenerate) {
      ++s.degenerate_points;
      if (p.j_mag > 0.0) raw = std::min(raw, p.delta_b / p.j_mag);
      continue;
    }
    best = std::min(best, p.sigma_b);
    raw = std::min(raw, p.sigma_b);
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::AllPointsDegenerate, "every grid point has vanishing mean spin");
  }
  s.sigma_min = best;
  s.sigma_min_raw = raw;

  // Each dip of sigma_b(tau) is represented by its grid-local minimum. Dips
  // within the tie tolerance of the global minimum are equivalent and the
  // earliest one is reported. Points arrive in increasing tau.
  std::vector<std::size_t> valid;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].degenerate) valid.push_back(k);
  }
  for (std::size_t v = 0; v < valid.size(); ++v) {
    const double here = points[valid[v]].sigma_b;
    const bool left_ok = v == 0 || here <= points[valid[v - 1]].sigma_b;
    const bool right_ok = v + 1 == valid.size() || here <= points[valid[v + 1]].sigma_b;
    if (left_ok && right_ok && here <= best + options.tie_tolerance) {
      const auto& p = points[valid[v]];
      s.tau_min_ns = p.tau_ns;
      s.theta_min_deg = p.theta_opt_deg;
      s.sigma_a_min = p.sigma_a;
      s.sigma_b_at_tau_min = p.sigma_b;
      break;
    }
  }
  return s;
}

SpectralPropagator make_propagator(const SpinSystemSpec& spec) {
  return SpectralPropagator(eig_hermitian(secular_hamiltonian(spec)), coherent_state(spec.n_spins));
}

SweepResult tau_sweep(const SpinSystemSpec& spec, const SweepGrid& grid, const SweepOptions& options) {
  spec.validate();
  grid.validate();
  const SpectralPropagator propagator = make_propagator(spec);

  SweepResult result;
  const std::size_t count = grid.tau_count();
  result.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    result.points.push_back(analyze_tau(propagator, grid.tau_at(k), grid, spec.observable_mode, options));
  }
  result.summary = summarize(result.points, spec.n_spins, grid, spec.observable_mode, options);
  return result;
}

EntropyTrace entropy_trace(const SpinSystemSpec& spec, const SweepGrid& grid) {
  spec.validate();
  grid.validate();
  const SpectralPropagator propagator = make_propagator(spec);

  EntropyTrace trace;
  trace.taus_ns = grid.taus();
  trace.entropies.reserve(trace.taus_ns.size());
  for (const double tau : trace.taus_ns) {
    const QuantumState psi = propagator.state_at(tau);
    std::vector<double> row(static_cast<std::size_t>(spec.n_spins));
    for (int site = 1; site <= spec.n_spins; ++site) {
      row[static_cast<std::size_t>(site - 1)] = von_neumann_entropy(reduced_site_density(psi, site));
    }
    trace.entropies.push_back(std::move(row));
  }
  return trace;
}

std::optional<double> first_plateau_crossing(const EntropyTrace& trace, double tolerance) {
  const double plateau = std::numbers::ln2;
  for (std::size_t k = 0; k < trace.taus_ns.size(); ++k) {
    const auto& row = trace.entropies[k];
    if (!row.empty() && *std::max_element(row.begin(), row.end()) >= plateau - tolerance) {
      return trace.taus_ns[k];
    }
  }
  return std::nullopt;
}

double sql_reference(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "spin count must be at least 1");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace dipsqueeze
