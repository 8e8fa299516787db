// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_DISCRETIZATION_HPP
#define DELAYWAVE_DISCRETIZATION_HPP

#include <functional>

#include <Eigen/Dense>

#include "delaywave/params.hpp"

namespace delaywave
{

// Uniform grids for Omega = (0, L) with Gamma0 = {0}, Gamma1 = {L}, and for the
// delay-line coordinate rho in (0, 1).
struct Mesh
{
  int n_cells = 0;        // spatial cells (>= 2); nodes x_j = j*h, node 0 eliminated
  int n_rho = 0;          // delay-line cells (>= 2); nodes rho_k = k*d_rho
  double length = 1.0;    // domain length L
  bool lump_mass = false; // diagonal (lumped) interior mass instead of consistent P1 mass

  double h() const { return length / n_cells; }
  double d_rho() const { return 1.0 / n_rho; }

  // Packed state layout: [u_1..u_n | v_1..v_n | z_1..z_m], n = n_cells, m = n_rho.
  int packed_dim() const { return 2 * n_cells + n_rho; }

  void validate() const;
};

// Semigroup state V = (u, u_t, u_t|_{x=L}, z). The boundary trace w and the inflow
// value z[0] are derived storage: packing keeps only v and z[1..m], and unpacking
// restores w = v_n and z[0] = v_n (the domain compatibility of the generator).
// Freshly sampled initial data may carry an incompatible history z[0] != u1(L);
// the energy of the initial datum is evaluated on those sampled values.
struct DiscreteState
{
  Eigen::VectorXd u;  // displacement at nodes 1..n
  Eigen::VectorXd v;  // velocity at nodes 1..n
  double w = 0.0;     // boundary velocity at x = L
  Eigen::VectorXd z;  // delay line at rho_k, k = 0..n_rho
};

// Discrete generator A (V' = A V), its Gram-weighted form GA, and the Gram matrix G
// of the xi-weighted energy inner product
//   <V,V>_G = u'Ku + v'(M + e_b e_b')v + xi*d_rho*sum_k z_k^2.
// GA is assembled exactly from the FEM blocks (never as the numeric product G*A), so
// quadratic forms and the symmetrized pencil inherit the exact skew cancellations.
struct GeneratorPair
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd GA;
  Eigen::MatrixXd G;
  Mesh mesh;
  SystemParams params;

  int dim() const { return static_cast<int>(A.rows()); }
};

// P1 stiffness matrix on (0, L) with the u(0)=0 node eliminated.
Eigen::MatrixXd stiffness_matrix(const Mesh& mesh);

// Interior mass matrix (consistent P1, or lumped when mesh.lump_mass is set).
Eigen::MatrixXd mass_matrix(const Mesh& mesh);

// Builds the packed generator of the reformulated system:
//   u' = v
//   (M + e_b e_b') v' = -K u - alpha*K v - (mu1 v_b + mu2 z_m) e_b
//   z_k' = -(z_k - z_{k-1}) / (tau*d_rho),  z_0 = v_b eliminated by substitution.
// Requires params.xi to be set.
GeneratorPair assemble(const SystemParams& params, const Mesh& mesh);

Eigen::VectorXd pack(const DiscreteState& state, const Mesh& mesh);
DiscreteState unpack(const Eigen::VectorXd& packed, const Mesh& mesh);

// Samples initial data: u0, u1 at the spatial nodes, z_k = f0(L, -tau*rho_k).
// f0 is the prescribed velocity history on Gamma1 for s in (-tau, 0).
DiscreteState initial_state(const std::function<double(double)>& u0,
                            const std::function<double(double)>& u1,
                            const std::function<double(double, double)>& f0,
                            const Mesh& mesh, double tau);

}  // namespace delaywave

#endif  // DELAYWAVE_DISCRETIZATION_HPP
