// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_FUNCTIONALS_HPP
#define DELAYWAVE_FUNCTIONALS_HPP

#include <limits>
#include <vector>

#include "delaywave/discretization.hpp"
#include "delaywave/simulate.hpp"

namespace delaywave
{

struct EnergySample
{
  double t = 0.0;
  double E = 0.0;            // weighted energy: E1/2 + (xi/2) * int z^2 drho
  double E1 = 0.0;           // |u'|^2 + |u_t|^2 + u_t(L)^2
  double Lyap = 0.0;         // Lyapunov functional for the configured epsilon
  double dE_residual = 0.0;  // |numeric dE/dt - identity RHS| (0 at the two ends)
};

struct DecayFit
{
  double gamma_hat = 0.0;  // fitted rate: E ~ C_hat * exp(-gamma_hat * t)
  double C_hat = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

struct EpsilonReport
{
  double epsilon = 0.0;
  double beta1 = 0.0;  // realized lower equivalence constant: beta1*E <= L
  double beta2 = 0.0;  // realized upper equivalence constant: L <= beta2*E
};

// Weighted energy of a state. The rho-quadrature is the trapezoid rule over
// z_0..z_m; the x-quadrature matches the discretization exactly.
double energy(const DiscreteState& state, const SystemParams& params, const Mesh& mesh);

double energy_e1(const DiscreteState& state, const Mesh& mesh);

// L = E + eps*(u,u_t) + eps*u_b*v_b + (eps*alpha/2)|u'|^2 + eps*xi*int e^{-2 tau rho} z^2.
double lyapunov(const DiscreteState& state, const SystemParams& params, const Mesh& mesh,
                double epsilon);

double energy_of_sample(const StepSample& s, double xi);
double e1_of_sample(const StepSample& s);
double lyapunov_of_sample(const StepSample& s, const SystemParams& params, double epsilon);

// Central-difference dE/dt against the energy-rate identity
//   dE/dt = -alpha|u_t'|^2 - (mu1 - xi/2tau) u_t(L)^2 - (xi/2tau) z_m^2 - mu2 u_t(L) z_m
// in its exact discrete transcription (the upwind transport adds its dissipation
// term and the trapezoid endpoint its boundary correction), so the residual
// measures time-discretization error only. The difference is step-centered:
// (E_k - E_{k-1})/dt against the RHS averaged over the two states; entry k
// describes the step ending at times[k], entry 0 is 0. Entries outside the
// requested window are 0. Requires >= 3 samples.
std::vector<double> energy_identity_residual(
    const Trajectory& traj, double t_from = -std::numeric_limits<double>::infinity(),
    double t_to = std::numeric_limits<double>::infinity());

// E, E1, L(epsilon) and the identity residual for every step of a trajectory.
std::vector<EnergySample> materialize_samples(const Trajectory& traj, double epsilon);

// Least squares on (t, log E) over the window. Any E <= 0 in the window is an
// error unless the window is identically zero (then gamma_hat = +inf).
// Requires at least 5 samples in the window.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& E,
                   double window_start, double window_end);

// Largest epsilon in the geometric grid {2^-k, k = 0..max_k} such that L is
// nonincreasing along the probe and beta1*E <= L <= beta2*E holds with beta1 > 0.
// Throws if no grid point works (probable parameter infeasibility).
EpsilonReport epsilon_search(const Trajectory& probe, int max_k = 40);

}  // namespace delaywave

#endif  // DELAYWAVE_FUNCTIONALS_HPP
