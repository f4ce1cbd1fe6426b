// Periodic 1D Lennard-Jones chain integrated with velocity Verlet.
// All particles carry mass M/N and interparticle forces are scaled by 1/N so
// the total energy stays bounded as N grows.

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mesochain {

enum class TestCase { Sine, Quartic };

const char* test_case_name(TestCase tc);
TestCase test_case_from_name(const std::string& name);

struct PotentialSpec {
  double epsilon_well = 0.025;  // well depth of U
  double sigma = 0.0;           // zero-crossing distance; equilibrium h = 2^(1/6) sigma
  double cutoff_factor = 2.5;   // force cut sharply at cutoff_factor * h
  double force_scale = 0.0;     // 1/N in 1D

  double equilibrium() const;   // h
  double cutoff() const;        // cutoff_factor * h

  // Defaults: sigma chosen so h equals the lattice spacing L/N.
  static PotentialSpec for_chain(int N, double L);
};

struct ChainState {
  double t = 0.0;
  double L = 1.0;
  int N = 0;
  std::vector<double> q;  // positions wrapped into [0, L)
  std::vector<double> v;
  double mass_total = 1.0;

  double particle_mass() const { return mass_total / N; }
};

struct Trajectory {
  std::vector<ChainState> snapshots;              // at the requested sample times
  std::vector<std::pair<double, double>> energy_trace;  // (t, total energy)
};

// Uniformly spaced lattice q_j = (j - 1/2) L/N with the test-case velocity
// profile: 1e-2 sin(2 pi x / L) or the truncated quartic bump on [L/3, 2L/3].
ChainState init_chain(int N, double L, TestCase test_case);

// Initial velocity profile v(x, 0) of a test case (x in [0, L]).
double initial_velocity(TestCase test_case, double x, double L);

// Raw Lennard-Jones value U(xi) = 4 eps [(sigma/xi)^12 - (sigma/xi)^6],
// zero beyond the cutoff. Energies use the shifted form (see total_energy)
// so the trace is continuous at the cutoff.
double lj_potential(double xi, const PotentialSpec& spec);

// dU/dxi of the raw potential (no cutoff applied).
double lj_potential_derivative(double xi, const PotentialSpec& spec);

// Net force on each particle: force_scale * sum over the three ring
// neighbors on each side within the cutoff, minimal-image distances.
// Throws on near-coincident particles.
std::vector<double> net_forces(const ChainState& state, const PotentialSpec& spec);

// One kick-drift-kick step of size dt; positions rewrapped into [0, L).
ChainState velocity_verlet_step(const ChainState& state, double dt,
                                const PotentialSpec& spec);

// Kinetic energy plus force_scale-weighted pair energy, each pair shifted by
// -U(cutoff) so energy is continuous where the force is cut.
double total_energy(const ChainState& state, const PotentialSpec& spec);
double kinetic_energy(const ChainState& state);
double potential_energy(const ChainState& state, const PotentialSpec& spec);

// Integrates until t_end, recording snapshots and the energy trace at each
// sample time. Sample times are snapped to the nearest step.
Trajectory simulate(int N, double L, TestCase test_case, double dt, double t_end,
                    const std::vector<double>& sample_times,
                    const PotentialSpec& spec);

}  // namespace mesochain
