// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_PARAMS_HPP
#define DELAYWAVE_PARAMS_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace delaywave
{

// Parameters of the delayed boundary-feedback wave system on (0, L):
//
//   u_tt - u_xx - alpha*u_txx = 0                                in (0, L), t > 0,
//   u(0, t) = 0,
//   u_tt(L, t) = -( (u + alpha*u_t)_x(L, t) + mu1*u_t(L, t) + mu2*u_t(L, t - tau) ).
//
// The delayed term is carried by the transport unknown z(rho, t) = u_t(L, t - tau*rho),
// which satisfies tau*z_t + z_rho = 0 with inflow z(0, t) = u_t(L, t).
struct SystemParams
{
  double alpha = 0.0;   // Kelvin-Voigt damping coefficient (>= 0; > 0 in proved regimes)
  double mu1 = 0.0;     // instantaneous boundary damping weight (>= 0)
  double mu2 = 0.0;     // delayed feedback weight (>= 0)
  double tau = 1.0;     // delay length (> 0)
  double length = 1.0;  // domain length L (> 0)

  // Delay-energy weight in the state-space inner product (> 0). Optional: when absent
  // it is auto-chosen strictly inside the feasible interval of the classified case.
  std::optional<double> xi;

  void validate() const;  // throws std::invalid_argument on violated bounds
};

// Trace-operator norm B (|u(L)| <= B*|u'|_2 over u(0)=0) and Poincare constant C
// (|u|_2 <= C*|u'|_2), computed on a discretization of the domain.
struct DomainConstants
{
  double trace_B = 0.0;
  double poincare_C = 0.0;
};

enum class CaseTag
{
  Case1,        // mu2 < mu1, alpha > 0
  Case2,        // mu2 >= mu1 and alpha > (mu2 - mu1)*B^2
  Infeasible,   // mu2 >= mu1 and alpha <= (mu2 - mu1)*B^2
  Exploratory,  // alpha == 0 with mu2 < mu1: energy nonincreasing, decay unproved
};

std::string to_string(CaseTag tag);

// Classification outcome plus the feasible interval for the weight xi:
//   Case1:  xi in [tau*mu2, tau*(2*mu1 - mu2)]
//   Case2:  xi in [tau*mu2, 2*tau*(alpha/B^2 + mu1 - mu2/2)), upper end strict
//   Infeasible: empty (xi_high <= xi_low)
struct StabilityVerdict
{
  CaseTag tag = CaseTag::Infeasible;
  double xi_low = 0.0;
  double xi_high = 0.0;
  double xi_mid = 0.0;  // exact interval midpoint (equals tau*mu1 in Case1)
  std::optional<double> chosen_xi;

  bool feasible() const { return tag == CaseTag::Case1 || tag == CaseTag::Case2; }
};

enum class XiPolicy
{
  Midpoint,
  LowerEdgePlusMargin,
};

// Signals parameters outside both proved stability regimes.
struct infeasible_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

StabilityVerdict classify_case(const SystemParams& params, const DomainConstants& constants);

// Picks xi strictly inside the feasible interval. The strict placement (relative margin)
// keeps the strict inequalities required by the decay estimates robust under rounding.
double choose_xi(const StabilityVerdict& verdict, XiPolicy policy, double margin = 1e-6);

// Validates an explicitly prescribed params.xi against the verdict's constraints.
void validate_xi(const SystemParams& params, const StabilityVerdict& verdict);

// Discrete trace constant: sqrt of the largest generalized eigenvalue of
// (boundary Gram, stiffness) on the P1 space with u(0)=0. Converges to sqrt(L).
double trace_constant(double length, int n_cells);

// Discrete Poincare constant: 1/sqrt of the smallest generalized eigenvalue of
// (stiffness, mass). Converges to 2L/pi.
double poincare_constant(double length, int n_cells);

DomainConstants domain_constants(double length, int n_cells);

}  // namespace delaywave

#endif  // DELAYWAVE_PARAMS_HPP
