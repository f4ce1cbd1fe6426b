#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mesochain/meso.hpp"
#include "oracles.hpp"

using namespace mesochain;

namespace {
ChainState perturbed_chain(int n, TestCase tc, unsigned seed, double amp) {
  ChainState s = init_chain(n, 1.0, tc);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-amp / n, amp / n);
  for (int i = 0; i < n; ++i) s.q[i] += jitter(rng);
  return s;
}
}  // namespace

TEST_CASE("average density: peak value, lattice limit, total mass") {
  // single particle sitting on a coarse node
  const MesoGrid grid1(4, 4, 1.0);
  ChainState one;
  one.N = 1;
  one.L = 1.0;
  one.q = {grid1.coarse_node(1)};
  one.v = {0.0};
  const WindowKernel chark(WindowKind::Characteristic, 1.0, 0.1);
  const auto rho1 = average_density(one, chark, grid1);
  CHECK(rho1[1] == doctest::Approx(10.0));  // (M/N) / (eta L)

  // uniform lattice: density within 1% of M/L at every node, all kernels
  const int n = 1000;
  const ChainState lattice = init_chain(n, 1.0, TestCase::Sine);
  const MesoGrid grid(100, n, 1.0);
  for (WindowKind kind :
       {WindowKind::Characteristic, WindowKind::Trapezoid, WindowKind::Triangle,
        WindowKind::Quadratic, WindowKind::Quartic, WindowKind::Gaussian}) {
    const WindowKernel kernel(kind, 1.0, 0.05);
    const auto rho = average_density(lattice, kernel, grid);
    double total = 0.0;
    for (int k = 0; k < grid.B; ++k) {
      CHECK(std::abs(rho[k] - 1.0) <= 1e-2);
      total += rho[k];
    }
    total *= grid.L / grid.B;
    CHECK(std::abs(total - 1.0) <= (kind == WindowKind::Gaussian ? 2.5e-3 : 5e-3));
  }
}

TEST_CASE("average momentum: zero, constant factor, direct-sum oracle") {
  const int n = 8;
  const MesoGrid grid(8, 8, 1.0);
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.2);
  ChainState s = perturbed_chain(n, TestCase::Sine, 5, 0.05);

  ChainState still = s;
  for (double& v : still.v) v = 0.0;
  for (double m : average_momentum(still, kernel, grid)) CHECK(m == 0.0);

  ChainState drifting = s;
  for (double& v : drifting.v) v = 0.37;
  const auto rho = average_density(drifting, kernel, grid);
  const auto mom = average_momentum(drifting, kernel, grid);
  for (int k = 0; k < grid.B; ++k)
    CHECK(std::abs(mom[k] - 0.37 * rho[k]) < 1e-13);

  const auto mom_s = average_momentum(s, kernel, grid);
  for (int k = 0; k < grid.B; ++k) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = s.v[i] / n;  // (M/N) v_i
    CHECK(std::abs(mom_s[k] -
                   oracle::direct_average(s, w, kernel, grid.coarse_node(k))) < 1e-14);
  }
}

TEST_CASE("average velocity: ratio, zero momentum, density floor") {
  std::vector<double> rho = {1.0, 2.0, 1e-12};
  std::vector<double> mom = {0.5, 1.0, 3.0};
  int floored = 0;
  const auto vel = average_velocity(rho, mom, 1.0, 1.0, &floored);
  CHECK(vel[0] == doctest::Approx(0.5));
  CHECK(vel[1] == doctest::Approx(0.5));
  CHECK(vel[2] == 0.0);  // below the 1e-10 M/L floor
  CHECK(floored == 1);

  const auto zero = average_velocity(rho, {0.0, 0.0, 0.0}, 1.0, 1.0);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("convective stress: fluctuation-free, non-positive, direct oracle") {
  const int n = 8;
  const MesoGrid grid(8, 8, 1.0);
  const WindowKernel kernel(WindowKind::Quartic, 1.0, 0.3);
  ChainState s = perturbed_chain(n, TestCase::Sine, 9, 0.05);

  ChainState uniform = s;
  for (double& v : uniform.v) v = 1.3;
  for (double tc : convective_stress_exact(uniform, kernel, grid))
    CHECK(std::abs(tc) < 1e-15);

  const auto tc = convective_stress_exact(s, kernel, grid);
  for (double val : tc) CHECK(val <= 0.0);

  // independent summation at each node
  const auto rho = average_density(s, kernel, grid);
  const auto mom = average_momentum(s, kernel, grid);
  for (int k = 0; k < grid.B; ++k) {
    const double vbar = mom[k] / rho[k];
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = -(s.v[i] - vbar) * (s.v[i] - vbar) / n;
    CHECK(std::abs(tc[k] -
                   oracle::direct_average(s, w, kernel, grid.coarse_node(k))) < 1e-14);
  }
}

TEST_CASE("bond integral quadrature against independent references") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> xs(-0.5, 0.5);
  std::uniform_real_distribution<double> bonds(-0.02, 0.02);

  // characteristic kernel: exact segment-overlap formula
  const WindowKernel charl(WindowKind::Characteristic, 1.0, 0.13);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = xs(rng), bond = bonds(rng);
    if (std::abs(bond) < 1e-6) continue;
    CHECK(bond_integral(charl, a, bond, 1.0) ==
          doctest::Approx(oracle::char_bond_integral(a, bond, 0.13, 1.0))
              .epsilon(1e-12));
  }

  // smooth kernels: Gauss-Legendre vs a dense midpoint reference
  for (WindowKind kind :
       {WindowKind::Triangle, WindowKind::Quadratic, WindowKind::Quartic,
        WindowKind::Gaussian, WindowKind::Trapezoid}) {
    const WindowKernel kernel(kind, 1.0, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = xs(rng), bond = bonds(rng);
      double ref = 0.0;
      const int panels = 20000;
      for (int p = 0; p < panels; ++p)
        ref += kernel.eval_periodic(a - (p + 0.5) / panels * bond);
      ref /= panels;
      const double tol = kind == WindowKind::Gaussian ? 1e-10 : 1e-6;
      CHECK(std::abs(bond_integral(kernel, a, bond, 1.0) - ref) <=
            tol * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("interaction stress: cutoff shell, support pruning, direct sum") {
  const int n = 16;
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const MesoGrid grid(16, 16, 1.0);
  ChainState s = perturbed_chain(n, TestCase::Sine, 13, 0.05);

  // with a tiny sigma every pair is beyond the cutoff shell
  PotentialSpec far = spec;
  far.sigma = 1e-9;
  const WindowKernel tri(WindowKind::Triangle, 1.0, 0.1);
  for (double ti : interaction_stress_exact(s, tri, grid, far)) CHECK(ti == 0.0);

  // support pruning must not change the field: compare against an unpruned
  // direct pair sum on a narrow kernel (most node/bond pairs are skipped)
  const WindowKernel narrow(WindowKind::Characteristic, 1.0, 0.02);
  const auto pruned = interaction_stress_exact(s, narrow, grid, spec);
  for (int k = 0; k < grid.B; ++k) {
    double direct = 0.0;
    for (int i = 0; i < n; ++i)
      for (int kk = 1; kk <= 3; ++kk) {
        const int j = (i + kk) % n;
        double d = s.q[j] - s.q[i];
        d -= std::round(d);
        const double r = std::abs(d);
        if (r > spec.cutoff()) continue;
        const double fij = spec.force_scale * lj_potential_derivative(r, spec) *
                           (d > 0.0 ? 1.0 : -1.0);
        double a = grid.coarse_node(k) - s.q[i];
        a -= std::round(a);
        direct += fij * d * bond_integral(narrow, a, d, 1.0);
      }
    CHECK(pruned[k] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("exact stresses are node-local: shared nodes across grids agree") {
  // (k+1/2)/50 = (3k+1+1/2)/150: grids B=50 and B=150 share every third node.
  const int n = 200;
  const ChainState s = perturbed_chain(n, TestCase::Sine, 21, 0.05);
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const WindowKernel gauss(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid a(50, n, 1.0), b(150, n, 1.0);
  const auto ta = interaction_stress_exact(s, gauss, a, spec);
  const auto tb = interaction_stress_exact(s, gauss, b, spec);
  const auto ca = convective_stress_exact(s, gauss, a);
  const auto cb = convective_stress_exact(s, gauss, b);
  for (int k = 0; k < a.B; ++k) {
    CHECK(std::abs(a.coarse_node(k) - b.coarse_node(3 * k + 1)) < 1e-15);
    CHECK(std::abs(ta[k] - tb[3 * k + 1]) <= 1e-10);
    CHECK(std::abs(ca[k] - cb[3 * k + 1]) <= 1e-10);
  }
}

TEST_CASE("exact recoverables: identity map, compression, mass, ordering") {
  const int n = 64;
  const MesoGrid grid(32, 256, 1.0);

  const ChainState lattice = init_chain(n, 1.0, TestCase::Sine);
  const FineFields flat = exact_recoverables(lattice, grid);
  for (double j : flat.J_exact) CHECK(j == doctest::Approx(1.0).epsilon(1e-12));

  // halve every gap in [0.25, 0.5): J = dx/gap doubles there
  ChainState squeezed = lattice;
  for (int i = 0; i < n; ++i) {
    const double x = lattice.q[i];
    squeezed.q[i] = x < 0.5 ? 0.25 + 0.5 * x : x;
  }
  const FineFields sq = exact_recoverables(squeezed, grid);
  CHECK(sq.J_exact[grid.Nf * 3 / 8] == doctest::Approx(2.0).epsilon(1e-6));

  // total reference mass: (L/Nf) sum J = L once the fine grid resolves gaps
  const MesoGrid dense(32, 4096, 1.0);
  const ChainState wavy = perturbed_chain(n, TestCase::Quartic, 23, 0.05);
  const FineFields wf = exact_recoverables(wavy, dense);
  double total = 0.0;
  for (double j : wf.J_exact) total += j;
  total /= dense.Nf;
  CHECK(std::abs(total - 1.0) <= 1e-3);

  // crossing particles break the ring order
  ChainState crossed = lattice;
  std::swap(crossed.q[3], crossed.q[10]);
  CHECK_THROWS_AS(exact_recoverables(crossed, grid), std::runtime_error);

  // velocity interpolant hits the particle values at particle positions
  const FineFields vf = exact_recoverables(lattice, MesoGrid(32, n, 1.0));
  for (int m = 0; m < n; ++m)
    CHECK(vf.v_exact[m] == doctest::Approx(lattice.v[m]).epsilon(1e-12));
}

TEST_CASE("mass balance residual") {
  const int n = 512;
  PotentialSpec spec = PotentialSpec::for_chain(n, 1.0);
  const WindowKernel kernel(WindowKind::Gaussian, 1.0, 0.1);
  const MesoGrid grid(128, n, 1.0);

  // static state: exact zero flux, residual at the rounding floor
  ChainState rest = init_chain(n, 1.0, TestCase::Sine);
  for (double& v : rest.v) v = 0.0;
  MesoFields f0 = meso_fields(rest, kernel, grid, spec);
  MesoFields f1 = f0;
  f0.t = 0.0;
  f1.t = 0.01;
  CHECK(mass_balance_residual(f0, f1, grid) <= 1e-12);

  // travelling chain: residual falls when the time interval is halved
  const std::vector<double> times = {0.46, 0.48, 0.5, 0.52, 0.54};
  const Trajectory traj = simulate(n, 1.0, TestCase::Sine, 1e-4, 0.6, times, spec);
  const auto fields = [&](int idx) {
    return meso_fields(traj.snapshots[idx], kernel, grid, spec);
  };
  const double r_wide = mass_balance_residual(fields(0), fields(4), grid);  // 0.08
  const double r_mid = mass_balance_residual(fields(1), fields(3), grid);   // 0.04
  CHECK(r_mid <= 0.6 * r_wide);

  MesoFields bad = f0;
  bad.density.pop_back();
  CHECK_THROWS_AS(mass_balance_residual(bad, f1, grid), std::invalid_argument);
}
