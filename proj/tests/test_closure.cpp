#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mesochain/closure.hpp"
#include "oracles.hpp"

using namespace mesochain;

namespace {
const FilterSpec kTsvd = FilterSpec::tsvd(1e-13);
}  // namespace

TEST_CASE("jacobian reconstruction: lattice, linearity, floor") {
  const int n = 256;
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid grid(128, n, 1.0);
  const auto system = cached_system(kernel, grid);
  const ChainState lattice = init_chain(n, 1.0, TestCase::Sine);

  const auto rho = average_density(lattice, kernel, grid);
  const auto J = reconstruct_jacobian(*system, rho, kTsvd);
  for (double j : J) CHECK(std::abs(j - 1.0) <= 1e-2);

  // linearity: doubling the density doubles the reconstruction
  std::vector<double> rho2(rho);
  for (double& r : rho2) r *= 2.0;
  const auto J2 = reconstruct_jacobian(*system, rho2, kTsvd);
  for (std::size_t m = 0; m < J.size(); ++m)
    CHECK(J2[m] == doctest::Approx(2.0 * J[m]).epsilon(1e-12));

  // superposition of two density fields
  std::vector<double> rho_b(rho);
  for (int k = 0; k < grid.B; ++k)
    rho_b[k] = rho[k] * (1.0 + 0.1 * std::sin(2.0 * M_PI * grid.coarse_node(k)));
  const auto Ja = reconstruct_jacobian(*system, rho, kTsvd);
  const auto Jb = reconstruct_jacobian(*system, rho_b, kTsvd);
  std::vector<double> rho_ab(grid.B);
  for (int k = 0; k < grid.B; ++k) rho_ab[k] = rho[k] + rho_b[k];
  const auto Jab = reconstruct_jacobian(*system, rho_ab, kTsvd);
  for (int m = 0; m < grid.Nf; ++m)
    CHECK(std::abs(Jab[m] - Ja[m] - Jb[m]) <= 1e-12);

  // a mostly-negative rhs trips the degenerate-reconstruction guard
  std::vector<double> bad(grid.B, -1.0);
  double fraction = 0.0;
  CHECK_THROWS_AS(reconstruct_jacobian(*system, bad, kTsvd, 1.0, &fraction),
                  std::runtime_error);
}

TEST_CASE("velocity reconstruction: zero momentum and constant drift") {
  const int n = 256;
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid grid(128, n, 1.0);
  const auto system = cached_system(kernel, grid);

  ChainState s = init_chain(n, 1.0, TestCase::Sine);
  for (double& v : s.v) v = 0.0;
  const auto rho = average_density(s, kernel, grid);
  const auto mom0 = average_momentum(s, kernel, grid);
  const auto v0 = reconstruct_velocity(*system, rho, mom0, kTsvd);
  for (double v : v0) CHECK(v == 0.0);

  for (double& v : s.v) v = 0.42;
  const auto momc = average_momentum(s, kernel, grid);
  const auto vc = reconstruct_velocity(*system, rho, momc, kTsvd);
  for (double v : vc) CHECK(std::abs(v - 0.42) <= 1e-6);
}

TEST_CASE("positions from jacobian: identity, scale invariance, round trip") {
  const int n = 64, nf = 512;

  const std::vector<double> ones(nf, 1.0);
  const auto q1 = positions_from_jacobian(ones, n, 1.0);
  for (int i = 0; i < n; ++i)
    CHECK(q1[i] == doctest::Approx((i + 0.5) / n).epsilon(1e-14));

  const std::vector<double> twos(nf, 2.0);
  const auto q2 = positions_from_jacobian(twos, n, 1.0);
  for (int i = 0; i < n; ++i) CHECK(q2[i] == doctest::Approx(q1[i]).epsilon(1e-14));

  // J from a smoothly deformed chain: positions recovered to the fine-grid
  // resolution after the optimal circular shift
  ChainState s = init_chain(n, 1.0, TestCase::Sine);
  for (int i = 0; i < n; ++i) {
    const double x = s.q[i];
    s.q[i] = x + 0.002 * std::sin(2.0 * M_PI * x);  // smooth displacement
  }
  const MesoGrid grid(32, nf, 1.0);
  const FineFields fine = exact_recoverables(s, grid);
  const auto qr = positions_from_jacobian(fine.J_exact, n, 1.0);
  double shift = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = qr[i] - s.q[i];
    d -= std::round(d);
    shift += d / n;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = qr[i] - shift - s.q[i];
    d -= std::round(d);
    worst = std::max(worst, std::abs(d));
  }
  CHECK(worst <= 2.0 / nf);

  CHECK_THROWS_AS(positions_from_jacobian({1.0}, 4, 1.0), std::invalid_argument);
}

TEST_CASE("particle velocities: constant and nodal-linear interpolation") {
  const int nf = 64;
  const std::vector<double> constant(nf, 3.25);
  const auto vc = particle_velocities(constant, {0.01, 0.4, 0.93}, 1.0);
  for (double v : vc) CHECK(v == doctest::Approx(3.25));

  // linear-in-y field evaluated exactly at the fine nodes
  std::vector<double> lin(nf);
  for (int m = 0; m < nf; ++m) lin[m] = 2.0 * (m + 0.5) / nf;
  std::vector<double> nodes(nf);
  for (int m = 0; m < nf; ++m) nodes[m] = (m + 0.5) / nf;
  const auto vl = particle_velocities(lin, nodes, 1.0);
  for (int m = 0; m < nf; ++m) CHECK(vl[m] == doctest::Approx(lin[m]).epsilon(1e-13));

  // between nodes the interpolation is linear
  const auto mid = particle_velocities(lin, {1.0 / nf}, 1.0);
  CHECK(mid[0] == doctest::Approx(0.5 * (lin[0] + lin[1])).epsilon(1e-13));
}

TEST_CASE("identical reconstruction reproduces the exact stresses") {
  const int n = 64;
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const WindowKernel kernel(WindowKind::Quartic, 1.0, 0.2);
  const MesoGrid grid(32, 256, 1.0);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> jitter(-0.03 / n, 0.03 / n);
  ChainState s = init_chain(n, 1.0, TestCase::Quartic);
  for (int i = 0; i < n; ++i) s.q[i] += jitter(rng);

  const auto tc = convective_stress_exact(s, kernel, grid);
  const auto ti = interaction_stress_exact(s, kernel, grid, spec);
  const auto [tc2, ti2] = approximate_stresses(s.q, s.v, kernel, grid, spec, 1.0);
  CHECK(oracle::linf_diff(tc, tc2) <= 1e-13);
  CHECK(oracle::linf_diff(ti, ti2) <= 1e-13);
}

TEST_CASE("self-consistency: exact fine fields through the closure path") {
  // At t = 0 with Nf = N the fine nodes coincide with the lattice, so the
  // whole reinsertion path is exact and the stress error is pure roundoff.
  const int n = 200;
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid grid(100, n, 1.0);

  for (TestCase tc : {TestCase::Sine, TestCase::Quartic}) {
    const ChainState s = init_chain(n, 1.0, tc);
    const FineFields fine = exact_recoverables(s, grid);
    const auto q = positions_from_jacobian(fine.J_exact, n, 1.0);
    const auto v = particle_velocities(fine.v_exact, q, 1.0);
    const auto [tc_a, ti_a] = approximate_stresses(q, v, kernel, grid, spec, 1.0);
    const auto tc_e = convective_stress_exact(s, kernel, grid);
    const auto ti_e = interaction_stress_exact(s, kernel, grid, spec);
    const double rel_tc =
        oracle::linf_diff(tc_e, tc_a) / std::max(oracle::linf(tc_e), 1e-300);
    const double rel_ti = oracle::linf_diff(ti_e, ti_a) / oracle::linf(ti_e);
    CHECK(rel_tc <= 1e-10);
    CHECK(rel_ti <= 1e-10);
  }
}

TEST_CASE("quartic test case round trip at t=0 recovers the velocity profile") {
  const int n = 1000;
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid grid(500, n, 1.0);
  const auto system = cached_system(kernel, grid);
  const ChainState s = init_chain(n, 1.0, TestCase::Quartic);

  const auto rho = average_density(s, kernel, grid);
  const auto mom = average_momentum(s, kernel, grid);
  const ReconstructedFields rec =
      reconstruct_fields(*system, rho, mom, kTsvd, 0.0, n, 1.0);

  double err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const double expect = initial_velocity(TestCase::Quartic, s.q[i], 1.0);
    err = std::max(err, std::abs(rec.v_particles[i] - expect));
    scale = std::max(scale, std::abs(expect));
  }
  CHECK(err / scale <= 0.02);
}

TEST_CASE("sandwich damping: convective error non-increasing in eta (test 1)") {
  const int n = 1000;
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const MesoGrid grid(500, n, 1.0);
  const Trajectory traj = simulate(n, 1.0, TestCase::Sine, 1e-4, 0.5, {0.5}, spec);
  const ChainState& s = traj.snapshots.front();

  double prev = std::numeric_limits<double>::infinity();
  for (double eta : {0.01, 0.1, 0.5, 0.9}) {
    const WindowKernel kernel(WindowKind::Gaussian, 1.0, eta);
    const auto system = cached_system(kernel, grid);
    const auto rho = average_density(s, kernel, grid);
    const auto mom = average_momentum(s, kernel, grid);
    const ReconstructedFields rec =
        reconstruct_fields(*system, rho, mom, kTsvd, s.t, n, 1.0);
    const auto [tc_a, ti_a] =
        approximate_stresses(rec.q_approx, rec.v_particles, kernel, grid, spec, 1.0);
    const auto tc_e = convective_stress_exact(s, kernel, grid);
    const double rel = oracle::linf_diff(tc_e, tc_a) / oracle::linf(tc_e);
    CHECK(rel <= prev);
    prev = rel;
  }
}
