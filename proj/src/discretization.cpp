// SPDX-License-Identifier: Apache-2.0

#include "delaywave/discretization.hpp"

#include <cmath>
#include <string>

namespace delaywave
{

void Mesh::validate() const
{
  if (n_cells < 2)
    throw std::invalid_argument("mesh too coarse: n_cells must be >= 2, got " +
                                std::to_string(n_cells));
  if (n_rho < 2)
    throw std::invalid_argument("mesh too coarse: n_rho must be >= 2, got " +
                                std::to_string(n_rho));
  if (!(length > 0.0))
    throw std::invalid_argument("mesh length must be positive");
}

Eigen::MatrixXd stiffness_matrix(const Mesh& mesh)
{
  const int n = mesh.n_cells;
  const double w = 1.0 / mesh.h();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K(0, 0) += w;  // element touching the eliminated Dirichlet node
  for (int e = 1; e < n; ++e)
  {
    K(e - 1, e - 1) += w;
    K(e, e) += w;
    K(e - 1, e) -= w;
    K(e, e - 1) -= w;
  }
  return K;
}

Eigen::MatrixXd mass_matrix(const Mesh& mesh)
{
  const int n = mesh.n_cells;
  const double h = mesh.h();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  if (mesh.lump_mass)
  {
    for (int j = 0; j < n - 1; ++j)
      M(j, j) = h;
    M(n - 1, n - 1) = 0.5 * h;
    return M;
  }
  M(0, 0) += h / 3.0;
  for (int e = 1; e < n; ++e)
  {
    M(e - 1, e - 1) += h / 3.0;
    M(e, e) += h / 3.0;
    M(e - 1, e) += h / 6.0;
    M(e, e - 1) += h / 6.0;
  }
  return M;
}

GeneratorPair assemble(const SystemParams& params, const Mesh& mesh)
{
  params.validate();
  mesh.validate();
  if (!params.xi)
    throw std::invalid_argument("assemble: params.xi must be chosen first");
  const double xi = *params.xi;

  const int n = mesh.n_cells;
  const int m = mesh.n_rho;
  const int dim = mesh.packed_dim();
  const int vb = 2 * n - 1;   // packed index of the boundary velocity v_b
  const int zm = dim - 1;     // packed index of z at rho = 1
  const double c = 1.0 / (params.tau * mesh.d_rho());

  const Eigen::MatrixXd K = stiffness_matrix(mesh);
  Eigen::MatrixXd Mb = mass_matrix(mesh);
  Mb(n - 1, n - 1) += 1.0;  // boundary point mass carries u_tt on Gamma1

  GeneratorPair pair;
  pair.mesh = mesh;
  pair.params = params;

  // Weighted generator GA, assembled exactly from the blocks.
  Eigen::MatrixXd& GA = pair.GA;
  GA = Eigen::MatrixXd::Zero(dim, dim);
  GA.block(0, n, n, n) = K;
  GA.block(n, 0, n, n) = -K;
  GA.block(n, n, n, n) = -params.alpha * K;
  GA(vb, vb) -= params.mu1;
  GA(vb, zm) -= params.mu2;
  GA(2 * n, vb) += xi / params.tau;  // inflow z_0 = v_b after elimination
  for (int k = 0; k < m; ++k)
  {
    GA(2 * n + k, 2 * n + k) -= xi / params.tau;
    if (k > 0)
      GA(2 * n + k, 2 * n + k - 1) += xi / params.tau;
  }

  // Gram matrix: stiffness for u, interior + point mass for v, xi*d_rho for z.
  Eigen::MatrixXd& G = pair.G;
  G = Eigen::MatrixXd::Zero(dim, dim);
  G.topLeftCorner(n, n) = K;
  G.block(n, n, n, n) = Mb;
  G.bottomRightCorner(m, m) = (xi * mesh.d_rho()) * Eigen::MatrixXd::Identity(m, m);

  // Plain generator A: solve the boundary-mass system for the v rows.
  Eigen::MatrixXd& A = pair.A;
  A = Eigen::MatrixXd::Zero(dim, dim);
  A.block(0, n, n, n).setIdentity();

  Eigen::MatrixXd C_v = Eigen::MatrixXd::Zero(n, dim);
  C_v.leftCols(n) = K;
  C_v.block(0, n, n, n) = params.alpha * K;
  C_v(n - 1, vb) += params.mu1;
  C_v(n - 1, zm) += params.mu2;
  Eigen::LLT<Eigen::MatrixXd> llt(Mb);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("assemble: boundary-mass matrix is not SPD");
  A.block(n, 0, n, dim) = -llt.solve(C_v);

  A(2 * n, vb) += c;
  for (int k = 0; k < m; ++k)
  {
    A(2 * n + k, 2 * n + k) -= c;
    if (k > 0)
      A(2 * n + k, 2 * n + k - 1) += c;
  }

  return pair;
}

Eigen::VectorXd pack(const DiscreteState& state, const Mesh& mesh)
{
  const int n = mesh.n_cells;
  const int m = mesh.n_rho;
  if (state.u.size() != n || state.v.size() != n || state.z.size() != m + 1)
    throw std::invalid_argument("pack: state sizes do not match the mesh");
  Eigen::VectorXd packed(mesh.packed_dim());
  packed.head(n) = state.u;
  packed.segment(n, n) = state.v;
  packed.tail(m) = state.z.tail(m);
  return packed;
}

DiscreteState unpack(const Eigen::VectorXd& packed, const Mesh& mesh)
{
  const int n = mesh.n_cells;
  const int m = mesh.n_rho;
  if (packed.size() != mesh.packed_dim())
    throw std::invalid_argument("unpack: vector length " + std::to_string(packed.size()) +
                                " does not match packed dimension " +
                                std::to_string(mesh.packed_dim()));
  DiscreteState state;
  state.u = packed.head(n);
  state.v = packed.segment(n, n);
  state.w = state.v(n - 1);
  state.z.resize(m + 1);
  state.z(0) = state.w;
  state.z.tail(m) = packed.tail(m);
  return state;
}

DiscreteState initial_state(const std::function<double(double)>& u0,
                            const std::function<double(double)>& u1,
                            const std::function<double(double, double)>& f0,
                            const Mesh& mesh, double tau)
{
  mesh.validate();
  if (!(tau > 0.0))
    throw std::invalid_argument("initial_state: tau must be positive");
  if (std::abs(u0(0.0)) > 1e-9)
    throw std::invalid_argument("initial_state: u0(0) != 0 (Dirichlet incompatibility), got " +
                                std::to_string(u0(0.0)));

  const int n = mesh.n_cells;
  const int m = mesh.n_rho;
  const double h = mesh.h();
  const double d_rho = mesh.d_rho();

  DiscreteState state;
  state.u.resize(n);
  state.v.resize(n);
  state.z.resize(m + 1);
  for (int j = 0; j < n; ++j)
  {
    const double x = (j + 1) * h;
    state.u(j) = u0(x);
    state.v(j) = u1(x);
  }
  state.w = state.v(n - 1);
  for (int k = 0; k <= m; ++k)
    state.z(k) = f0(mesh.length, -tau * (k * d_rho));
  return state;
}

}  // namespace delaywave
