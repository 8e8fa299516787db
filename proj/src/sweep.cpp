// SPDX-License-Identifier: Apache-2.0

#include "delaywave/sweep.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "delaywave/format.hpp"
#include "delaywave/functionals.hpp"
#include "delaywave/spectral.hpp"

namespace delaywave
{

namespace
{

const std::set<std::string> kAxisNames = {"alpha", "mu1", "mu2", "tau", "length", "xi"};

void apply_axis(SystemParams& p, const std::string& name, double value)
{
  if (name == "alpha")
    p.alpha = value;
  else if (name == "mu1")
    p.mu1 = value;
  else if (name == "mu2")
    p.mu2 = value;
  else if (name == "tau")
    p.tau = value;
  else if (name == "length")
    p.length = value;
  else if (name == "xi")
    p.xi = value;
  else
    throw std::invalid_argument("unknown axis name: " + name);
}

double fallback_xi(const SystemParams& p)
{
  // Non-feasible points still need a positive energy weight for bookkeeping.
  return p.mu2 > 0.0 ? 1.01 * p.tau * p.mu2 : p.tau;
}

SweepRecord eval_point(const SweepPlan& plan, const std::vector<double>& values,
                       const DomainConstants* cached_constants)
{
  SweepRecord record;
  SystemParams p = plan.base;
  for (std::size_t a = 0; a < plan.axes.size(); ++a)
    apply_axis(p, plan.axes[a].name, values[a]);
  record.params = p;
  try
  {
    p.validate();
    const DomainConstants constants =
        cached_constants ? *cached_constants : domain_constants(p.length, plan.mesh.n_cells);
    StabilityVerdict verdict = classify_case(p, constants);
    double xi_used;
    if (p.xi)
    {
      validate_xi(p, verdict);
      xi_used = *p.xi;
    }
    else if (verdict.feasible())
    {
      xi_used = choose_xi(verdict, XiPolicy::Midpoint);
    }
    else
    {
      xi_used = fallback_xi(p);
    }
    verdict.chosen_xi = xi_used;
    record.verdict = verdict;
    record.has_verdict = true;
    record.xi_used = xi_used;
    record.feasible = verdict.feasible();

    SystemParams assembled = p;
    assembled.xi = xi_used;
    Mesh mesh = plan.mesh;
    mesh.length = p.length;
    const GeneratorPair pair = assemble(assembled, mesh);

    SpectrumReport spec_report;
    if (plan.per_point == PerPoint::Spectrum || plan.per_point == PerPoint::Both)
    {
      spec_report = spectrum(pair);
      record.abscissa = spec_report.abscissa;
    }
    if (plan.per_point == PerPoint::Trajectory || plan.per_point == PerPoint::Both)
    {
      const double L = mesh.length;
      const DiscreteState init = initial_state(
          [L](double x) { return std::sin(M_PI * x / (2.0 * L)); },
          [](double) { return 0.0; }, [](double, double) { return 0.0; }, mesh,
          assembled.tau);
      const Trajectory traj =
          integrate(pack(init, mesh), pair, plan.time, plan.time.n_steps());
      std::vector<double> E;
      E.reserve(traj.samples.size());
      for (const StepSample& s : traj.samples)
        E.push_back(energy_of_sample(s, xi_used));
      const DecayFit fit =
          fit_decay(traj.times, E, plan.time.t_end / 10.0, plan.time.t_end);
      record.gamma_hat = fit.gamma_hat;
    }
  }
  catch (const std::exception& e)
  {
    record.error = e.what();
    record.abscissa.reset();
    record.gamma_hat.reset();
  }
  return record;
}

}  // namespace

void SweepPlan::validate() const
{
  if (axes.empty() || axes.size() > 3)
    throw std::invalid_argument("sweep plan needs 1 to 3 axes");
  for (const AxisSpec& axis : axes)
  {
    if (!kAxisNames.count(axis.name))
      throw std::invalid_argument("unknown axis name: " + axis.name);
    if (axis.count < 2)
      throw std::invalid_argument("axis count must be >= 2 for axis " + axis.name);
    if (!(axis.min < axis.max))
      throw std::invalid_argument("axis min must be < max for axis " + axis.name);
    if (axis.log_scale && !(axis.min > 0.0))
      throw std::invalid_argument("log axis requires positive min for axis " + axis.name);
  }
  mesh.validate();
  if (per_point != PerPoint::Spectrum)
    time.validate();
}

std::size_t SweepPlan::grid_size() const
{
  std::size_t total = 1;
  for (const AxisSpec& axis : axes)
    total *= static_cast<std::size_t>(axis.count);
  return total;
}

std::vector<double> axis_values(const AxisSpec& axis)
{
  std::vector<double> values(axis.count);
  for (int i = 0; i < axis.count; ++i)
  {
    const double s = static_cast<double>(i) / (axis.count - 1);
    if (axis.log_scale)
      values[i] = std::exp(std::log(axis.min) + s * (std::log(axis.max) - std::log(axis.min)));
    else
      values[i] = axis.min + s * (axis.max - axis.min);
  }
  return values;
}

namespace
{

std::vector<SweepRecord> run_sweep_impl(const SweepPlan& plan, bool parallel)
{
  plan.validate();
  std::vector<std::vector<double>> axes_values;
  for (const AxisSpec& axis : plan.axes)
    axes_values.push_back(axis_values(axis));

  const std::size_t total = plan.grid_size();
  std::vector<SweepRecord> records(total);

  // The domain constants depend only on (length, n_cells); hoist them unless a
  // length axis varies per point.
  bool has_length_axis = false;
  for (const AxisSpec& axis : plan.axes)
    if (axis.name == "length")
      has_length_axis = true;
  DomainConstants cached;
  if (!has_length_axis)
    cached = domain_constants(plan.base.length, plan.mesh.n_cells);

  const auto point_values = [&](std::size_t index) {
    std::vector<double> values(plan.axes.size());
    std::size_t rest = index;
    for (std::size_t a = plan.axes.size(); a-- > 0;)
    {
      const std::size_t count = static_cast<std::size_t>(plan.axes[a].count);
      values[a] = axes_values[a][rest % count];
      rest /= count;
    }
    return values;
  };

  const long long n = static_cast<long long>(total);
  if (parallel)
  {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
      records[static_cast<std::size_t>(i)] =
          eval_point(plan, point_values(static_cast<std::size_t>(i)),
                     has_length_axis ? nullptr : &cached);
  }
  else
  {
    for (long long i = 0; i < n; ++i)
      records[static_cast<std::size_t>(i)] =
          eval_point(plan, point_values(static_cast<std::size_t>(i)),
                     has_length_axis ? nullptr : &cached);
  }

  for (std::size_t i = 0; i < records.size(); ++i)
  {
    const SweepRecord& r = records[i];
    if (r.feasible && r.abscissa && *r.abscissa > 1e-8)
      throw std::runtime_error(
          "sweep: feasible point with positive abscissa " + format_double(*r.abscissa) +
          " at grid index " + std::to_string(i) + " (mu1=" + format_double(r.params.mu1) +
          ", mu2=" + format_double(r.params.mu2) + ", alpha=" + format_double(r.params.alpha) +
          ", tau=" + format_double(r.params.tau) + ", xi=" + format_double(r.xi_used) + ")");
  }
  return records;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepPlan& plan)
{
  return run_sweep_impl(plan, /*parallel=*/true);
}

std::vector<SweepRecord> run_sweep_serial(const SweepPlan& plan)
{
  return run_sweep_impl(plan, /*parallel=*/false);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records)
{
  out << "mu1,mu2,alpha,tau,xi,case,abscissa,gamma_hat,feasible\n";
  for (const SweepRecord& r : records)
  {
    out << format_double(r.params.mu1) << ',' << format_double(r.params.mu2) << ','
        << format_double(r.params.alpha) << ',' << format_double(r.params.tau) << ',';
    if (r.has_verdict)
      out << format_double(r.xi_used);
    out << ',';
    if (r.has_verdict)
      out << to_string(r.verdict.tag);
    out << ',';
    if (r.abscissa)
      out << format_double(*r.abscissa);
    out << ',';
    if (r.gamma_hat)
      out << format_double(*r.gamma_hat);
    out << ',' << (r.feasible ? "true" : "false") << '\n';
  }
}

std::vector<std::string> alpha_monotonicity_violations(const SweepPlan& plan,
                                                       const std::vector<SweepRecord>& records,
                                                       double tol)
{
  std::vector<std::string> violations;
  std::size_t alpha_axis = plan.axes.size();
  for (std::size_t a = 0; a < plan.axes.size(); ++a)
    if (plan.axes[a].name == "alpha")
      alpha_axis = a;
  if (alpha_axis == plan.axes.size())
    return violations;  // no alpha axis; nothing to scan

  // Stride of the alpha axis in the row-major grid (first axis slowest).
  std::size_t stride = 1;
  for (std::size_t a = plan.axes.size(); a-- > alpha_axis + 1;)
    stride *= static_cast<std::size_t>(plan.axes[a].count);
  const std::size_t alpha_count = static_cast<std::size_t>(plan.axes[alpha_axis].count);

  for (std::size_t start = 0; start < records.size(); ++start)
  {
    const std::size_t along = (start / stride) % alpha_count;
    if (along != 0)
      continue;
    double prev = std::numeric_limits<double>::infinity();
    bool prev_valid = false;
    for (std::size_t j = 0; j < alpha_count; ++j)
    {
      const SweepRecord& r = records[start + j * stride];
      if (!r.feasible || !r.abscissa)
      {
        prev_valid = false;
        continue;
      }
      if (prev_valid && *r.abscissa > prev + tol)
        violations.push_back("abscissa increased with alpha at alpha=" +
                             format_double(r.params.alpha) + " (" + format_double(prev) +
                             " -> " + format_double(*r.abscissa) + ")");
      prev = *r.abscissa;
      prev_valid = true;
    }
  }
  return violations;
}

}  // namespace delaywave
