// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_SWEEP_HPP
#define DELAYWAVE_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "delaywave/params.hpp"
#include "delaywave/discretization.hpp"
#include "delaywave/simulate.hpp"

namespace delaywave
{

struct AxisSpec
{
  std::string name;  // one of: alpha, mu1, mu2, tau, length, xi
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log_scale = false;
};

enum class PerPoint
{
  Spectrum,
  Trajectory,
  Both,
};

struct SweepPlan
{
  std::vector<AxisSpec> axes;  // 1 to 3 axes; first axis slowest
  SystemParams base;           // values for the non-axis parameters
  Mesh mesh;
  PerPoint per_point = PerPoint::Spectrum;
  TimeGrid time;               // used by Trajectory/Both
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t grid_size() const;
};

struct SweepRecord
{
  SystemParams params;  // parameter values at this grid point
  StabilityVerdict verdict;
  bool has_verdict = false;  // false when the point failed before classification
  double xi_used = 0.0;
  std::optional<double> abscissa;
  std::optional<double> gamma_hat;
  bool feasible = false;
  std::string error;  // nonempty when this point failed; never aborts the sweep
};

std::vector<double> axis_values(const AxisSpec& axis);

// Per-point pipeline: classify, choose xi (non-feasible points fall back to
// 1.01*tau*mu2 so the abscissa map extends across the theorem boundary), assemble,
// analyze. Deterministic ordering by grid index; identical output for the serial
// and the OpenMP variant.
std::vector<SweepRecord> run_sweep(const SweepPlan& plan);         // OpenMP over points
std::vector<SweepRecord> run_sweep_serial(const SweepPlan& plan);  // reference

// Fixed columns: mu1,mu2,alpha,tau,xi,case,abscissa,gamma_hat,feasible.
// Missing optionals render as empty cells. LF line endings, locale-independent.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

// Empirical check that the abscissa is nonincreasing in alpha along every line of
// the grid at fixed other parameters; returns a description per violation.
std::vector<std::string> alpha_monotonicity_violations(const SweepPlan& plan,
                                                       const std::vector<SweepRecord>& records,
                                                       double tol = 1e-8);

}  // namespace delaywave

#endif  // DELAYWAVE_SWEEP_HPP
