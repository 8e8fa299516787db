// SPDX-License-Identifier: Apache-2.0

#include "delaywave/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace delaywave
{

void TimeGrid::validate() const
{
  if (!(dt > 0.0))
    throw std::invalid_argument("dt must be positive, got " + std::to_string(dt));
  if (!(t_end > 0.0))
    throw std::invalid_argument("t_end must be positive, got " + std::to_string(t_end));
  if (theta < 0.5 || theta > 1.0)
    throw std::invalid_argument("theta must lie in [0.5, 1], got " + std::to_string(theta));
}

int TimeGrid::n_steps() const
{
  const int n = static_cast<int>(std::llround(t_end / dt));
  return n > 0 ? n : 1;
}

double default_dt(const SystemParams& params, const Mesh& mesh)
{
  return params.tau / (2.0 * mesh.n_rho);
}

ThetaStepper::ThetaStepper(const GeneratorPair& pair, const TimeGrid& grid)
{
  grid.validate();
  const Eigen::MatrixXd lhs = pair.G - (grid.theta * grid.dt) * pair.GA;
  rhs_ = pair.G + ((1.0 - grid.theta) * grid.dt) * pair.GA;
  lhs_lu_.compute(lhs);

  // LU has no rank signal; probe the factorization once.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(pair.dim());
  const Eigen::VectorXd probe = lhs_lu_.solve(lhs * ones);
  if (!probe.allFinite() || (probe - ones).norm() > 1e-6 * std::sqrt(double(pair.dim())))
    throw std::runtime_error("theta-step matrix is numerically singular");
}

void ThetaStepper::advance(Eigen::VectorXd& state) const
{
  state = lhs_lu_.solve(rhs_ * state);
}

namespace
{

// |v'|^2, the Kelvin-Voigt dissipation density.
double grad_form_v(const Eigen::VectorXd& packed, const Mesh& mesh)
{
  const int n = mesh.n_cells;
  const double h = mesh.h();
  const auto v = packed.segment(n, n);
  double vKv = v(0) * v(0) / h;
  for (int j = 1; j < n; ++j)
  {
    const double d = v(j) - v(j - 1);
    vKv += d * d / h;
  }
  return vKv;
}

// Boundary acceleration a_b = e_b' (M + e_b e_b')^{-1} (-K u - alpha K v - (mu1 v_b + mu2 z_m) e_b),
// via a Thomas sweep on the tridiagonal boundary-mass matrix.
double boundary_acceleration(const Eigen::VectorXd& packed, const Mesh& mesh,
                             const SystemParams& params)
{
  const int n = mesh.n_cells;
  const double h = mesh.h();
  const auto u = packed.head(n);
  const auto v = packed.segment(n, n);
  const double vb = v(n - 1);
  const double zm = packed(packed.size() - 1);

  auto stiffness_apply = [&](const decltype(u)& x, int j) {
    double r = 2.0 * x(j);
    if (j > 0)
      r -= x(j - 1);
    if (j + 1 < n)
      r -= x(j + 1);
    else
      r -= x(j);  // last diagonal is 1/h, not 2/h
    return r / h;
  };

  std::vector<double> rhs(n), diag(n), off(n, mesh.lump_mass ? 0.0 : h / 6.0);
  for (int j = 0; j < n; ++j)
  {
    rhs[j] = -stiffness_apply(u, j) - params.alpha * stiffness_apply(v, j);
    diag[j] = mesh.lump_mass ? h : 2.0 * h / 3.0;
  }
  diag[n - 1] = (mesh.lump_mass ? 0.5 * h : h / 3.0) + 1.0;
  rhs[n - 1] -= params.mu1 * vb + params.mu2 * zm;

  for (int j = 1; j < n; ++j)
  {
    const double m = off[j] / diag[j - 1];
    diag[j] -= m * off[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  return rhs[n - 1] / diag[n - 1];
}

}  // namespace

StepSample sample_state(const Eigen::VectorXd& packed, double t, const Mesh& mesh,
                        const SystemParams& params)
{
  const int n = mesh.n_cells;
  const int m = mesh.n_rho;
  const double h = mesh.h();
  const double d_rho = mesh.d_rho();
  const double xi = params.xi.value_or(0.0);

  StepSample s;
  s.t = t;

  const auto u = packed.head(n);
  const auto v = packed.segment(n, n);
  const auto z = packed.tail(m);
  const double vb = v(n - 1);
  const double ub = u(n - 1);

  // Element loops; the node eliminated by u(0)=0 contributes a zero endpoint.
  double uKu = u(0) * u(0) / h;
  for (int j = 1; j < n; ++j)
  {
    const double d = u(j) - u(j - 1);
    uKu += d * d / h;
  }
  s.uKu = uKu;

  double vMv = 0.0;
  double uMv = 0.0;
  if (mesh.lump_mass)
  {
    for (int j = 0; j < n - 1; ++j)
    {
      vMv += h * v(j) * v(j);
      uMv += h * u(j) * v(j);
    }
    vMv += 0.5 * h * vb * vb;
    uMv += 0.5 * h * ub * vb;
  }
  else
  {
    vMv = (h / 3.0) * v(0) * v(0);
    uMv = (h / 3.0) * u(0) * v(0);
    for (int j = 1; j < n; ++j)
    {
      const double a = v(j - 1), b = v(j);
      const double ua = u(j - 1), ub_ = u(j);
      vMv += (h / 3.0) * (a * a + a * b + b * b);
      uMv += (h / 6.0) * (2.0 * ua * a + ua * b + ub_ * a + 2.0 * ub_ * b);
    }
  }
  s.vMv = vMv;
  s.uMv = uMv;
  s.wb2 = vb * vb;
  s.uwb = ub * vb;

  // Trapezoid rho-quadratures with the inflow value z_0 = v_b.
  double zq = 0.5 * vb * vb;
  double zq_exp = 0.5 * vb * vb;  // e^0 = 1 at rho = 0
  double zq_rect = 0.0;
  for (int k = 1; k <= m; ++k)
  {
    const double zk = z(k - 1);
    const double wk = (k == m) ? 0.5 : 1.0;
    zq += wk * zk * zk;
    zq_exp += wk * std::exp(-2.0 * params.tau * (k * d_rho)) * zk * zk;
    zq_rect += zk * zk;
  }
  s.zq = zq * d_rho;
  s.zq_exp = zq_exp * d_rho;
  s.zq_rect = zq_rect * d_rho;

  // Exact rate of the trapezoid-quadrature energy along the semidiscrete flow:
  // the energy-rate identity plus the upwind-dissipation and boundary-trapezoid
  // corrections of this discretization, all evaluated from the state.
  const double zm = z(m - 1);
  double transport = 0.0;
  for (int k = 1; k <= m; ++k)
  {
    const double zk = z(k - 1);
    const double prev = (k == 1) ? vb : z(k - 2);
    transport += ((k == m) ? 0.5 : 1.0) * zk * (zk - prev);
  }
  s.identity_rhs = -params.alpha * grad_form_v(packed, mesh) - params.mu1 * vb * vb -
                   params.mu2 * vb * zm - (xi / params.tau) * transport +
                   0.5 * xi * d_rho * vb * boundary_acceleration(packed, mesh, params);
  return s;
}

Trajectory integrate(const Eigen::VectorXd& initial, const GeneratorPair& pair,
                     const TimeGrid& grid, int snapshot_stride)
{
  grid.validate();
  if (pair.mesh.packed_dim() != pair.dim())
    throw std::invalid_argument("integrate: pair mesh does not match the matrices");
  if (initial.size() != pair.dim())
    throw std::invalid_argument("integrate: initial state has wrong dimension");
  if (snapshot_stride < 1)
    throw std::invalid_argument("integrate: snapshot stride must be >= 1");

  const int n_steps = grid.n_steps();
  Trajectory traj;
  traj.mesh = pair.mesh;
  traj.params = pair.params;
  traj.grid = grid;
  traj.times.reserve(n_steps + 1);
  traj.samples.reserve(n_steps + 1);

  ThetaStepper stepper(pair, grid);
  Eigen::VectorXd state = initial;

  auto record = [&](int k) {
    const double t = k * grid.dt;
    traj.times.push_back(t);
    traj.samples.push_back(sample_state(state, t, pair.mesh, pair.params));
    if (k % snapshot_stride == 0 || k == n_steps)
    {
      traj.snapshot_steps.push_back(k);
      traj.snapshots.push_back(state);
    }
  };

  record(0);
  for (int k = 1; k <= n_steps; ++k)
  {
    stepper.advance(state);
    record(k);
  }
  return traj;
}

Eigen::VectorXd integrate_delay_line(const std::function<double(double)>& signal,
                                     double tau, int n_rho, const TimeGrid& grid)
{
  grid.validate();
  if (!(tau > 0.0))
    throw std::invalid_argument("integrate_delay_line: tau must be positive");
  if (n_rho < 2)
    throw std::invalid_argument("integrate_delay_line: n_rho must be >= 2");

  const int m = n_rho;
  const double c = 1.0 / (tau / n_rho);  // 1 / (tau * d_rho)
  const double a = grid.theta * grid.dt * c;
  const double b = (1.0 - grid.theta) * grid.dt * c;

  // (I - theta*dt*B) z+ = (I + (1-theta)*dt*B) z + dt*c*e_1*(theta s(t+dt) + (1-theta) s(t))
  // with B lower bidiagonal; the solve is a forward sweep.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd rhs(m);
  const int n_steps = grid.n_steps();
  for (int k = 0; k < n_steps; ++k)
  {
    const double t = k * grid.dt;
    rhs(0) = z(0) + b * (signal(t) - z(0)) + a * signal(t + grid.dt);
    for (int i = 1; i < m; ++i)
      rhs(i) = z(i) + b * (z(i - 1) - z(i));
    z(0) = rhs(0) / (1.0 + a);
    for (int i = 1; i < m; ++i)
      z(i) = (rhs(i) + a * z(i - 1)) / (1.0 + a);
  }
  return z;
}

}  // namespace delaywave
