// SPDX-License-Identifier: Apache-2.0

#include "delaywave/params.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "delaywave/discretization.hpp"

namespace delaywave
{

void SystemParams::validate() const
{
  if (!(tau > 0.0))
    throw std::invalid_argument("tau must be positive, got " + std::to_string(tau));
  if (!(length > 0.0))
    throw std::invalid_argument("length must be positive, got " + std::to_string(length));
  if (!(alpha >= 0.0))
    throw std::invalid_argument("alpha must be nonnegative, got " + std::to_string(alpha));
  if (!(mu1 >= 0.0))
    throw std::invalid_argument("mu1 must be nonnegative, got " + std::to_string(mu1));
  if (!(mu2 >= 0.0))
    throw std::invalid_argument("mu2 must be nonnegative, got " + std::to_string(mu2));
  if (xi && !(*xi > 0.0))
    throw std::invalid_argument("xi must be positive, got " + std::to_string(*xi));
}

std::string to_string(CaseTag tag)
{
  switch (tag)
  {
    case CaseTag::Case1:
      return "Case1";
    case CaseTag::Case2:
      return "Case2";
    case CaseTag::Infeasible:
      return "Infeasible";
    case CaseTag::Exploratory:
      return "Exploratory";
  }
  return "Unknown";
}

StabilityVerdict classify_case(const SystemParams& params, const DomainConstants& constants)
{
  params.validate();
  if (!(constants.trace_B > 0.0))
    throw std::invalid_argument("trace constant B must be positive");

  const double B2 = constants.trace_B * constants.trace_B;
  StabilityVerdict verdict;

  if (params.mu2 < params.mu1)
  {
    verdict.xi_low = params.tau * params.mu2;
    verdict.xi_high = params.tau * (2.0 * params.mu1 - params.mu2);
    verdict.xi_mid = params.tau * params.mu1;
    // The decay theorem for this case still spends alpha*|∇u_t|^2; with alpha = 0 the
    // energy is nonincreasing but the exponential rate is unproved.
    verdict.tag = params.alpha > 0.0 ? CaseTag::Case1 : CaseTag::Exploratory;
    return verdict;
  }

  verdict.xi_low = params.tau * params.mu2;
  verdict.xi_high =
      2.0 * params.tau * (params.alpha / B2 + params.mu1 - 0.5 * params.mu2);
  if (params.alpha > (params.mu2 - params.mu1) * B2)
  {
    verdict.tag = CaseTag::Case2;
    verdict.xi_mid = 0.5 * (verdict.xi_low + verdict.xi_high);
  }
  else
  {
    verdict.tag = CaseTag::Infeasible;
    verdict.xi_mid = 0.0;
  }
  return verdict;
}

double choose_xi(const StabilityVerdict& verdict, XiPolicy policy, double margin)
{
  if (!verdict.feasible())
    throw infeasible_error("no admissible xi: case is " + to_string(verdict.tag));
  const double lo = verdict.xi_low;
  const double hi = verdict.xi_high;
  const double width = hi - lo;
  if (!(width > 0.0))
    throw infeasible_error("xi interval is empty: [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + ")");

  switch (policy)
  {
    case XiPolicy::Midpoint:
      return verdict.xi_mid;
    case XiPolicy::LowerEdgePlusMargin:
    {
      const double inner_lo = lo + margin * width;
      const double inner_hi = hi - margin * width;
      return std::clamp(lo * (1.0 + margin), inner_lo, inner_hi);
    }
  }
  throw std::invalid_argument("unknown xi policy");
}

void validate_xi(const SystemParams& params, const StabilityVerdict& verdict)
{
  if (!params.xi)
    return;
  const double xi = *params.xi;
  if (verdict.tag == CaseTag::Case1)
  {
    if (xi < verdict.xi_low || xi > verdict.xi_high)
      throw std::invalid_argument("xi=" + std::to_string(xi) + " outside Case1 interval [" +
                                  std::to_string(verdict.xi_low) + ", " +
                                  std::to_string(verdict.xi_high) + "]");
  }
  else if (verdict.tag == CaseTag::Case2)
  {
    if (xi < verdict.xi_low || xi >= verdict.xi_high)
      throw std::invalid_argument("xi=" + std::to_string(xi) + " outside Case2 interval [" +
                                  std::to_string(verdict.xi_low) + ", " +
                                  std::to_string(verdict.xi_high) + ")");
  }
}

namespace
{

void check_constant_mesh(double length, int n_cells)
{
  if (!(length > 0.0))
    throw std::invalid_argument("length must be positive");
  if (n_cells < 4)
    throw std::invalid_argument("n_cells must be at least 4 for the domain constants");
}

}  // namespace

double trace_constant(double length, int n_cells)
{
  check_constant_mesh(length, n_cells);
  Mesh mesh;
  mesh.n_cells = n_cells;
  mesh.n_rho = 2;
  mesh.length = length;
  const Eigen::MatrixXd K = stiffness_matrix(mesh);

  Eigen::MatrixXd boundary_gram = Eigen::MatrixXd::Zero(n_cells, n_cells);
  boundary_gram(n_cells - 1, n_cells - 1) = 1.0;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      boundary_gram, K, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("trace_constant: generalized eigensolve failed (singular stiffness?)");
  return std::sqrt(solver.eigenvalues().maxCoeff());
}

double poincare_constant(double length, int n_cells)
{
  check_constant_mesh(length, n_cells);
  Mesh mesh;
  mesh.n_cells = n_cells;
  mesh.n_rho = 2;
  mesh.length = length;
  const Eigen::MatrixXd K = stiffness_matrix(mesh);
  const Eigen::MatrixXd M = mass_matrix(mesh);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      K, M, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("poincare_constant: generalized eigensolve failed");
  const double lambda_min = solver.eigenvalues()(0);
  if (!(lambda_min > 0.0))
    throw std::runtime_error("poincare_constant: nonpositive smallest eigenvalue");
  return 1.0 / std::sqrt(lambda_min);
}

DomainConstants domain_constants(double length, int n_cells)
{
  return DomainConstants{trace_constant(length, n_cells), poincare_constant(length, n_cells)};
}

}  // namespace delaywave
