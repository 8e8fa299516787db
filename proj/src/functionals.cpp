// SPDX-License-Identifier: Apache-2.0

#include "delaywave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace delaywave
{

namespace
{

StepSample sample_of_state(const DiscreteState& state, const SystemParams& params,
                           const Mesh& mesh)
{
  // Shares the packed sampling path for u, v; the rho-quadratures are redone on the
  // state's own z so that freshly sampled (possibly incompatible) histories count.
  StepSample s = sample_state(pack(state, mesh), 0.0, mesh, params);
  const int m = mesh.n_rho;
  const double d_rho = mesh.d_rho();
  double zq = 0.0, zq_exp = 0.0;
  for (int k = 0; k <= m; ++k)
  {
    const double wk = (k == 0 || k == m) ? 0.5 : 1.0;
    const double zk = state.z(k);
    zq += wk * zk * zk;
    zq_exp += wk * std::exp(-2.0 * params.tau * (k * d_rho)) * zk * zk;
  }
  s.zq = zq * d_rho;
  s.zq_exp = zq_exp * d_rho;
  s.wb2 = state.w * state.w;
  return s;
}

}  // namespace

double energy_of_sample(const StepSample& s, double xi)
{
  return 0.5 * (s.uKu + s.vMv + s.wb2) + 0.5 * xi * s.zq;
}

double e1_of_sample(const StepSample& s)
{
  return s.uKu + s.vMv + s.wb2;
}

double lyapunov_of_sample(const StepSample& s, const SystemParams& params, double epsilon)
{
  const double xi = params.xi.value_or(0.0);
  return energy_of_sample(s, xi) + epsilon * (s.uMv + s.uwb) +
         0.5 * epsilon * params.alpha * s.uKu + epsilon * xi * s.zq_exp;
}

double energy(const DiscreteState& state, const SystemParams& params, const Mesh& mesh)
{
  return energy_of_sample(sample_of_state(state, params, mesh), params.xi.value_or(0.0));
}

double energy_e1(const DiscreteState& state, const Mesh& mesh)
{
  SystemParams dummy;
  dummy.xi = 1.0;
  return e1_of_sample(sample_of_state(state, dummy, mesh));
}

double lyapunov(const DiscreteState& state, const SystemParams& params, const Mesh& mesh,
                double epsilon)
{
  if (!(epsilon > 0.0))
    throw std::invalid_argument("lyapunov: epsilon must be positive");
  return lyapunov_of_sample(sample_of_state(state, params, mesh), params, epsilon);
}

std::vector<double> energy_identity_residual(const Trajectory& traj, double t_from,
                                             double t_to)
{
  const std::size_t n = traj.samples.size();
  if (n < 3)
    throw std::invalid_argument("energy_identity_residual: need at least 3 samples");
  const double xi = traj.params.xi.value_or(0.0);
  const double dt = traj.grid.dt;
  // Step-centered: (E_{k} - E_{k-1})/dt is the central difference at the half-node,
  // matched against the identity RHS averaged over the two adjacent states. Entry k
  // describes the step ending at times[k]; entry 0 is 0.
  std::vector<double> residual(n, 0.0);
  for (std::size_t k = 1; k < n; ++k)
  {
    if (traj.times[k] < t_from || traj.times[k] > t_to)
      continue;
    const double dE = (energy_of_sample(traj.samples[k], xi) -
                       energy_of_sample(traj.samples[k - 1], xi)) /
                      dt;
    const double rhs =
        0.5 * (traj.samples[k - 1].identity_rhs + traj.samples[k].identity_rhs);
    residual[k] = std::abs(dE - rhs);
  }
  return residual;
}

std::vector<EnergySample> materialize_samples(const Trajectory& traj, double epsilon)
{
  const double xi = traj.params.xi.value_or(0.0);
  const std::vector<double> residual =
      traj.samples.size() >= 3 ? energy_identity_residual(traj)
                               : std::vector<double>(traj.samples.size(), 0.0);
  std::vector<EnergySample> out;
  out.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k)
  {
    const StepSample& s = traj.samples[k];
    EnergySample e;
    e.t = s.t;
    e.E = energy_of_sample(s, xi);
    e.E1 = e1_of_sample(s);
    e.Lyap = lyapunov_of_sample(s, traj.params, epsilon);
    e.dE_residual = residual[k];
    out.push_back(e);
  }
  return out;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& E,
                   double window_start, double window_end)
{
  if (times.size() != E.size())
    throw std::invalid_argument("fit_decay: times and E must have equal length");

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= window_start - 1e-12 && times[k] <= window_end + 1e-12)
      idx.push_back(k);
  if (idx.size() < 5)
    throw std::invalid_argument("fit_decay: fewer than 5 samples in window");

  bool all_zero = true;
  for (std::size_t k : idx)
  {
    if (E[k] != 0.0)
      all_zero = false;
    if (E[k] < 0.0)
      throw std::invalid_argument("fit_decay: negative energy in window");
  }
  DecayFit fit;
  fit.window_start = window_start;
  fit.window_end = window_end;
  if (all_zero)
  {
    // Identically-zero tail: instantaneous decay by convention.
    fit.gamma_hat = std::numeric_limits<double>::infinity();
    fit.C_hat = 0.0;
    fit.r_squared = 1.0;
    return fit;
  }
  for (std::size_t k : idx)
    if (E[k] == 0.0)
      throw std::invalid_argument("fit_decay: zero energy in window (log undefined)");

  const double n = static_cast<double>(idx.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k : idx)
  {
    sx += times[k];
    sy += std::log(E[k]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k : idx)
  {
    const double dx = times[k] - mx;
    const double dy = std::log(E[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  fit.gamma_hat = -slope;
  fit.C_hat = std::exp(my - slope * mx);
  // syy at roundoff level means constant data: a perfect fit by the flat line.
  const double syy_floor = 1e-24 * n * (1.0 + my * my);
  fit.r_squared = syy > syy_floor ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

EpsilonReport epsilon_search(const Trajectory& probe, int max_k)
{
  const double xi = probe.params.xi.value_or(0.0);
  if (probe.samples.empty())
    throw std::invalid_argument("epsilon_search: empty probe trajectory");

  bool any_positive = false;
  for (const StepSample& s : probe.samples)
    if (energy_of_sample(s, xi) > 0.0)
      any_positive = true;
  if (!any_positive)
    return EpsilonReport{1.0, 1.0, 1.0};  // zero trajectory: every epsilon works

  for (int k = 0; k <= max_k; ++k)
  {
    const double eps = std::ldexp(1.0, -k);
    bool ok = true;
    double beta1 = std::numeric_limits<double>::infinity();
    double beta2 = 0.0;
    double prev_L = std::numeric_limits<double>::infinity();
    for (const StepSample& s : probe.samples)
    {
      const double E = energy_of_sample(s, xi);
      const double L = lyapunov_of_sample(s, probe.params, eps);
      if (L > prev_L * (1.0 + 1e-10))
      {
        ok = false;
        break;
      }
      prev_L = L;
      if (E > 0.0)
      {
        const double ratio = L / E;
        if (!(ratio > 0.0))
        {
          ok = false;
          break;
        }
        beta1 = std::min(beta1, ratio);
        beta2 = std::max(beta2, ratio);
      }
    }
    if (ok && beta1 > 0.0 && std::isfinite(beta2))
      return EpsilonReport{eps, beta1, beta2};
  }
  throw std::runtime_error(
      "epsilon_search: no admissible epsilon in the grid (parameters likely infeasible)");
}

}  // namespace delaywave
