#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dipsqueeze/scenarios.hpp"
#include "dipsqueeze/squeezing.hpp"
#include "test_helpers.hpp"

using namespace dipsqueeze;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SweepGrid tau_window(double start, double end, double step = 1.0) {
  SweepGrid g;
  g.tau_start_ns = start;
  g.tau_end_ns = end;
  g.tau_step_ns = step;
  return g;
}

// Rotated second moments from the unrotated covariance:
// R^dag Jy R = cos(t) Jy - sin(t) Jz for R = exp(-i t Jx).
double rotated_delta_y(const QuantumState& psi, int n, double theta_deg) {
  const ComplexMatrix jy = testutil::collective_by_kron(n, 'y');
  const ComplexMatrix jz = testutil::collective_by_kron(n, 'z');
  const ComplexVector& v = psi.amplitudes();
  const ComplexVector y = jy * v, z = jz * v;
  const double my = v.dot(y).real(), mz = v.dot(z).real();
  const double vyy = y.squaredNorm() - my * my;
  const double vzz = z.squaredNorm() - mz * mz;
  const double cyz = y.dot(z).real() - my * mz;
  const double c = std::cos(theta_deg * kDeg), s = std::sin(theta_deg * kDeg);
  return std::sqrt(std::max(0.0, c * c * vyy + s * s * vzz - 2 * c * s * cyz));
}

}  // namespace

TEST_CASE("sweep grid") {
  SweepGrid g;
  CHECK(g.tau_count() == 651);
  CHECK(g.thetas_deg().size() == 180);
  CHECK(g.thetas_deg().back() == 179.0);
  g.validate();

  SweepGrid bad = g;
  bad.tau_step_ns = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.theta_end_deg = 90.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.tau_end_ns = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);

  SweepGrid empty = g;
  empty.theta_start_deg = 10.0;
  empty.theta_end_deg = 5.0;
  CHECK(empty.thetas_deg().empty());
  CHECK_THROWS_AS(theta_sweep(coherent_state(2), empty), Error);
}

TEST_CASE("rotate_x") {
  const auto jx_eig = eig_hermitian(collective_operator(3, Axis::X));
  const QuantumState plus = coherent_state(3);

  CHECK((rotate_x(plus, 0.0, jx_eig).amplitudes() - plus.amplitudes()).norm() < 1e-13);

  for (double theta : {17.0, 90.0, 133.0}) {
    const auto r = rotate_x(plus, theta, jx_eig);
    // Eigenstate of Jx: only a global phase.
    CHECK(std::abs(std::abs(plus.amplitudes().dot(r.amplitudes())) - 1.0) < 1e-12);
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      CHECK(expectation(r, collective_operator(3, a)) ==
            doctest::Approx(expectation(plus, collective_operator(3, a))).epsilon(1e-12));
    }
  }

  SUBCASE("convention anchor: theta = 90 takes up to -y") {
    ComplexVector up = ComplexVector::Zero(2);
    up[0] = 1.0;
    const QuantumState psi(up, 1);
    const auto r = rotate_x(psi, 90.0, eig_hermitian(collective_operator(1, Axis::X)));
    CHECK(std::abs(expectation(r, site_operator(1, 1, Axis::Z))) < 1e-14);
    CHECK(expectation(r, site_operator(1, 1, Axis::Y)) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK((rotate_x_product(psi, 90.0).amplitudes() - r.amplitudes()).norm() < 1e-14);
  }

  SUBCASE("eigensystem and product forms agree") {
    std::mt19937 rng(8);
    for (int n = 1; n <= 5; ++n) {
      const QuantumState psi(testutil::random_state(1 << n, rng), n);
      const auto eig = eig_hermitian(collective_operator(n, Axis::X));
      for (double theta : {0.0, 33.0, 90.0, 179.0, 271.5}) {
        const auto a = rotate_x(psi, theta, eig);
        const auto b = rotate_x_product(psi, theta);
        CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
        CHECK(expectation(b, collective_operator(n, Axis::X)) ==
              doctest::Approx(expectation(psi, collective_operator(n, Axis::X))).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("theta sweep") {
  SUBCASE("coherent state is isotropic, tie goes to theta = 0") {
    const auto sweep = theta_sweep(coherent_state(3), SweepGrid{});
    for (const auto& s : sweep.samples) {
      CHECK(s.delta_y == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
      CHECK(s.delta_z == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    }
    CHECK(sweep.theta_opt_deg == 0.0);
    CHECK(sweep.delta_b == doctest::Approx(sweep.delta_a));
  }

  const auto prop3 = make_propagator(scenario_uniform(3, 1.0));

  SUBCASE("matches the rotated-covariance oracle") {
    for (double tau : {0.0, 37.0, 89.0, 250.0, 501.0}) {
      const auto psi = prop3.state_at(tau);
      const auto sweep = theta_sweep(psi, SweepGrid{});
      for (std::size_t k = 0; k < sweep.samples.size(); k += 7) {
        CHECK(sweep.samples[k].delta_y == doctest::Approx(rotated_delta_y(psi, 3, sweep.samples[k].theta_deg)).epsilon(1e-10));
      }
    }
  }

  SUBCASE("N = 3 optimum angle at 89 ns") {
    const auto sweep = theta_sweep(prop3.state_at(89.0), SweepGrid{});
    CHECK(sweep.theta_opt_deg == 51.0);
    CHECK(sweep.delta_b < sweep.delta_a);
  }

  SUBCASE("triangle optimum angle at 1045 ns") {
    const auto sweep = theta_sweep(make_propagator(scenario_triangle()).state_at(1045.0), SweepGrid{});
    CHECK(sweep.theta_opt_deg == 129.0);
  }

  SUBCASE("ellipse closure: 180-degree period and 90-degree swap") {
    SweepGrid wide;
    wide.theta_end_deg = 359.0;
    for (double tau : {40.0, 89.0, 400.0}) {
      const auto sweep = theta_sweep(prop3.state_at(tau), wide);
      for (std::size_t k = 0; k < 180; ++k) {
        CHECK(std::abs(sweep.samples[k].delta_y - sweep.samples[k + 180].delta_y) < 1e-10);
        CHECK(std::abs(sweep.samples[k].delta_z - sweep.samples[k + 180].delta_z) < 1e-10);
        CHECK(std::abs(sweep.samples[k].delta_z - sweep.samples[k + 90].delta_y) < 1e-10);
      }
    }
  }
}

TEST_CASE("analyze_tau") {
  const auto prop = make_propagator(scenario_uniform(3, 1.0));
  const SweepGrid grid;
  const auto mode = ObservableMode::collective();

  const auto p0 = analyze_tau(prop, 0.0, grid, mode);
  CHECK(p0.sigma_b == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(p0.sigma_a == doctest::Approx(0.577).epsilon(1e-3));
  for (double s : p0.entropy) CHECK(s < 1e-12);

  const auto p89 = analyze_tau(prop, 89.0, grid, mode);
  CHECK(p89.sigma_b == doctest::Approx(0.440).epsilon(0.005 / 0.44));
  CHECK(p89.sigma_a == doctest::Approx(0.961).epsilon(0.005 / 0.961));
  CHECK(p89.delta_b <= p89.delta_a);
  CHECK(p89.j_mag <= 1.5 + 1e-9);
  CHECK(p89.max_mean_drift < 1e-10);

  const auto p333 = analyze_tau(prop, 333.0, grid, mode);
  CHECK(std::abs(p333.j_exp[0]) < 0.01);
  for (double s : p333.entropy) CHECK(s == doctest::Approx(0.69).epsilon(0.01 / 0.69));
  CHECK_FALSE(p333.degenerate);

  SUBCASE("means follow the one-axis-twisting closed form") {
    for (int n = 2; n <= 6; ++n) {
      const auto pn = make_propagator(scenario_uniform(n, 1.0));
      for (double tau = 0; tau <= 650; tau += 50) {
        const auto p = analyze_tau(pn, tau, grid, mode);
        CHECK(p.j_exp[0] == doctest::Approx(testutil::one_axis_twisting_jx(n, 1.0, tau)).epsilon(1e-9));
        CHECK(std::abs(p.j_exp[1]) < 1e-10);
        CHECK(std::abs(p.j_exp[2]) < 1e-10);
      }
    }
  }
}

TEST_CASE("tau sweep") {
  SUBCASE("N = 3 optimum") {
    const auto r = tau_sweep(scenario_uniform(3, 1.0), SweepGrid{});
    CHECK(r.points.size() == 651);
    CHECK(r.summary.sigma_min == doctest::Approx(0.440).epsilon(0.005 / 0.44));
    CHECK(r.summary.tau_min_ns == 89.0);
    CHECK(r.summary.theta_min_deg == 51.0);
    CHECK(r.summary.sigma_0 == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(r.summary.sigma_min < r.summary.sigma_0);
    for (const auto& p : r.points) {
      CHECK(p.robertson_margin >= -1e-9);
      CHECK(p.max_mean_drift < 1e-10);
    }
  }

  SUBCASE("no coupling, no squeezing") {
    for (int n : {2, 3, 5}) {
      const auto r = tau_sweep(scenario_uniform(n, 0.0), tau_window(0, 100, 10));
      for (const auto& p : r.points) {
        CHECK(p.sigma_b == doctest::Approx(1 / std::sqrt(n)).epsilon(1e-12));
        CHECK(p.sigma_a == doctest::Approx(1 / std::sqrt(n)).epsilon(1e-12));
      }
      CHECK(r.summary.sigma_min == doctest::Approx(r.summary.sigma_0).epsilon(1e-12));
      CHECK(r.summary.tau_min_ns == 0.0);
    }
  }

  SUBCASE("N = 10 optimum") {
    const auto r = tau_sweep(scenario_uniform(10, 1.0), tau_window(30, 60));
    CHECK(r.summary.sigma_min == doctest::Approx(0.176).epsilon(0.005 / 0.176));
    CHECK(r.summary.tau_min_ns == 43.0);
    CHECK(r.summary.theta_min_deg == 63.0);
  }

  SUBCASE("mirror dips resolve to the earliest tau") {
    // For N = 4 the dip at ~594 ns is lower than the 73 ns dip by ~6e-6.
    const auto r = tau_sweep(scenario_uniform(4, 1.0), SweepGrid{});
    CHECK(r.summary.tau_min_ns == 73.0);
    CHECK(r.summary.theta_min_deg == 54.0);
    CHECK(r.summary.sigma_b_at_tau_min - r.summary.sigma_min < 1e-4);
    CHECK(r.summary.sigma_b_at_tau_min >= r.summary.sigma_min);
  }
}

TEST_CASE("summary reduction") {
  auto point = [](double tau, double sigma, bool degenerate = false) {
    SqueezingPoint p;
    p.tau_ns = tau;
    p.j_mag = degenerate ? 1e-9 : 1.0;
    p.delta_b = sigma * p.j_mag;
    p.sigma_b = degenerate ? std::nan("") : sigma;
    p.sigma_a = 1.0;
    p.theta_opt_deg = tau;
    p.degenerate = degenerate;
    return p;
  };
  const SweepGrid grid;
  using M = ObservableMode;

  const std::vector<SqueezingPoint> dips = {point(0, 0.6), point(1, 0.5), point(2, 0.55), point(3, 0.49995), point(4, 0.6)};
  const auto s = summarize(dips, 3, grid, M::collective());
  CHECK(s.sigma_min == 0.49995);
  CHECK(s.tau_min_ns == 1.0);

  const std::vector<SqueezingPoint> separated = {point(0, 0.6), point(1, 0.5), point(2, 0.6), point(3, 0.45), point(4, 0.6)};
  CHECK(summarize(separated, 3, grid, M::collective()).tau_min_ns == 3.0);

  const std::vector<SqueezingPoint> flagged = {point(0, 0.6), point(1, 0.0, true), point(2, 0.55)};
  const auto f = summarize(flagged, 3, grid, M::collective());
  CHECK(f.degenerate_points == 1);
  CHECK(f.sigma_min == 0.55);
  CHECK(f.sigma_min_raw == doctest::Approx(0.0));

  const std::vector<SqueezingPoint> all_bad = {point(0, 0.0, true), point(1, 0.0, true)};
  try {
    (void)summarize(all_bad, 3, grid, M::collective());
    FAIL("expected AllPointsDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllPointsDegenerate);
  }
}

TEST_CASE("single-site observables") {
  // Other-site rotations commute with site-1 operators.
  const auto spec = scenario_chain(ObservableMode::single_site(1));
  const auto prop = make_propagator(spec);
  const auto sy = site_operator(3, 1, Axis::Y);
  const auto sz = site_operator(3, 1, Axis::Z);
  for (double tau : {0.0, 70.0, 600.0, 2785.0}) {
    const auto psi = prop.state_at(tau);
    const auto sweep = theta_sweep(psi, SweepGrid{}, spec.observable_mode);
    for (std::size_t k = 0; k < sweep.samples.size(); k += 11) {
      ComplexVector local = psi.amplitudes();
      rotate_site_x(local, 3, 1, sweep.samples[k].theta_deg * kDeg);
      const QuantumState only_site1(local, 3);
      CHECK(sweep.samples[k].delta_y == doctest::Approx(uncertainty(only_site1, sy)).epsilon(1e-12));
      CHECK(sweep.samples[k].delta_z == doctest::Approx(uncertainty(only_site1, sz)).epsilon(1e-12));
    }
    CHECK(sweep.robertson_margin >= -1e-9);
  }
}

TEST_CASE("interaction strength scaling") {
  // sigma_b(tau; 10 d) == sigma_b(10 tau; d)
  const auto fast = tau_sweep(scenario_uniform(3, 10.0), tau_window(0, 65, 1)).points;
  const auto slow = tau_sweep(scenario_uniform(3, 1.0), tau_window(0, 650, 10)).points;
  REQUIRE(fast.size() == slow.size());
  for (std::size_t k = 0; k < fast.size(); ++k) {
    CHECK(std::abs(fast[k].sigma_b - slow[k].sigma_b) < 1e-9 * std::max(1.0, slow[k].sigma_b));
    CHECK(fast[k].theta_opt_deg == slow[k].theta_opt_deg);
  }
}

TEST_CASE("entropy trace") {
  const auto trace3 = entropy_trace(scenario_uniform(3, 1.0), tau_window(0, 400));
  for (double s : trace3.entropies.front()) CHECK(s < 1e-12);
  for (const auto& row : trace3.entropies) {
    for (double s : row) CHECK(std::abs(s - row.front()) < 1e-10);
  }
  for (double s : trace3.entropies[333]) CHECK(s == doctest::Approx(0.69).epsilon(0.01 / 0.69));

  const auto trace4 = entropy_trace(scenario_uniform(4, 1.0), tau_window(73, 73));
  CHECK(trace4.entropies.front()[0] == doctest::Approx(0.290).epsilon(0.01 / 0.29));

  const auto crossing = first_plateau_crossing(trace3);
  REQUIRE(crossing.has_value());
  CHECK(*crossing < 333.0);
  CHECK_FALSE(first_plateau_crossing(entropy_trace(scenario_uniform(3, 0.0), tau_window(0, 50, 10))).has_value());
}

TEST_CASE("standard quantum limit") {
  CHECK(sql_reference(1) == 1.0);
  CHECK(sql_reference(4) == 0.5);
  CHECK(sql_reference(100) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(sql_reference(0), Error);
}
