// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_SIMULATE_HPP
#define DELAYWAVE_SIMULATE_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "delaywave/discretization.hpp"

namespace delaywave
{

// One-parameter implicit time integrator; theta = 0.5 is Crank-Nicolson, theta = 1
// implicit Euler. theta < 0.5 is rejected: the Kelvin-Voigt stiffness scales like
// alpha/h^2 and makes explicit stepping impractical.
struct TimeGrid
{
  double dt = 0.0;
  double t_end = 0.0;
  double theta = 0.5;

  void validate() const;
  int n_steps() const;
};

// Default step: tau/(2*n_rho), so the delay line is temporally resolved.
double default_dt(const SystemParams& params, const Mesh& mesh);

// Quadratic building blocks of one packed state, sampled every step. Energy,
// E1 and the Lyapunov functional for any epsilon are linear combinations of
// these, so trajectories stay cheap to post-process.
struct StepSample
{
  double t = 0.0;
  double uKu = 0.0;     // |u'|^2  (P1 stiffness form)
  double vMv = 0.0;     // |v|^2   (interior mass form)
  double wb2 = 0.0;     // v_b^2   (boundary point mass)
  double uMv = 0.0;     // (u, v)  interior
  double uwb = 0.0;     // u_b*v_b boundary
  double zq = 0.0;      // trapezoid quadrature of z^2 over rho (z_0 = v_b)
  double zq_exp = 0.0;  // trapezoid quadrature of e^{-2*tau*rho} z^2
  double zq_rect = 0.0; // rectangle quadrature matching the Gram z-block
  double identity_rhs = 0.0;  // RHS of the energy-rate identity at this state
};

struct Trajectory
{
  std::vector<double> times;            // t_k = k*dt, every step
  std::vector<StepSample> samples;      // aligned with times
  std::vector<int> snapshot_steps;      // step indices of stored states
  std::vector<Eigen::VectorXd> snapshots;
  Mesh mesh;
  SystemParams params;
  TimeGrid grid;
};

// Implicit theta-scheme stepper: (G - theta*dt*GA) V+ = (G + (1-theta)*dt*GA) V.
// The factorization of the left matrix is built once per (pair, dt, theta).
class ThetaStepper
{
 public:
  ThetaStepper(const GeneratorPair& pair, const TimeGrid& grid);

  void advance(Eigen::VectorXd& state) const;

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lhs_lu_;
  Eigen::MatrixXd rhs_;
};

StepSample sample_state(const Eigen::VectorXd& packed, double t, const Mesh& mesh,
                        const SystemParams& params);

// Repeated theta-steps from the packed initial state; energy blocks sampled every
// step, full states stored every snapshot_stride steps (plus first and last).
Trajectory integrate(const Eigen::VectorXd& initial, const GeneratorPair& pair,
                     const TimeGrid& grid, int snapshot_stride = 10);

// Transport-only integration of the delay line driven by a prescribed boundary
// signal s(t): tau*z_t + z_rho = 0 with inflow z(rho=0, t) = s(t), initial z = 0.
// Returns the line values z_1..z_m at t_end.
Eigen::VectorXd integrate_delay_line(const std::function<double(double)>& signal,
                                     double tau, int n_rho, const TimeGrid& grid);

}  // namespace delaywave

#endif  // DELAYWAVE_SIMULATE_HPP
