// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "delaywave/discretization.hpp"
#include "delaywave/functionals.hpp"

using namespace delaywave;

namespace
{

Mesh make_mesh(int n_cells, int n_rho, double length = 1.0)
{
  Mesh mesh;
  mesh.n_cells = n_cells;
  mesh.n_rho = n_rho;
  mesh.length = length;
  return mesh;
}

SystemParams make_params(double alpha, double mu1, double mu2, double tau, double xi)
{
  SystemParams p;
  p.alpha = alpha;
  p.mu1 = mu1;
  p.mu2 = mu2;
  p.tau = tau;
  p.length = 1.0;
  p.xi = xi;
  return p;
}

Eigen::VectorXd random_vector(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = normal(rng);
  return v;
}

}  // namespace

TEST_CASE("packed dimension is 2*n_cells + n_rho")
{
  for (auto [n, m] : {std::pair{2, 2}, {10, 7}, {200, 100}})
  {
    const Mesh mesh = make_mesh(n, m);
    CHECK(mesh.packed_dim() == 2 * n + m);
    const auto pair = assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), mesh);
    CHECK(pair.A.rows() == 2 * n + m);
    CHECK(pair.G.rows() == 2 * n + m);
  }
}

TEST_CASE("assemble rejects too-coarse meshes and missing xi")
{
  CHECK_THROWS_AS(assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), make_mesh(1, 10)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), make_mesh(10, 1)),
                  std::invalid_argument);
  SystemParams no_xi = make_params(0.1, 1.0, 0.5, 1.0, 1.0);
  no_xi.xi.reset();
  CHECK_THROWS_AS(assemble(no_xi, make_mesh(10, 10)), std::invalid_argument);
}

TEST_CASE("stiffness and mass matrix structure")
{
  const Mesh mesh = make_mesh(8, 4, 2.0);
  const Eigen::MatrixXd K = stiffness_matrix(mesh);
  const Eigen::MatrixXd M = mass_matrix(mesh);

  // Row sums of K vanish except at the Dirichlet-adjacent row.
  const Eigen::VectorXd row_sums = K * Eigen::VectorXd::Ones(8);
  CHECK(row_sums(0) == doctest::Approx(1.0 / mesh.h()));
  for (int j = 1; j < 8; ++j)
    CHECK(row_sums(j) == doctest::Approx(0.0).epsilon(1e-14));

  // Interior mass totals L minus the eliminated-node overlap: int (1 - phi_0)^2 = L - 2h/3.
  CHECK(M.sum() == doctest::Approx(mesh.length - 2.0 * mesh.h() / 3.0).epsilon(1e-13));
  CHECK(std::abs(M.sum() - mesh.length) <= mesh.h());

  CHECK((K - K.transpose()).norm() == 0.0);
  CHECK((M - M.transpose()).norm() == 0.0);
}

TEST_CASE("Gram matrix is symmetric positive definite and G*A matches GA")
{
  const auto pair = assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), make_mesh(20, 10));
  CHECK((pair.G - pair.G.transpose()).norm() == 0.0);
  Eigen::LLT<Eigen::MatrixXd> llt(pair.G);
  CHECK(llt.info() == Eigen::Success);

  const double scale = pair.GA.norm();
  CHECK((pair.G * pair.A - pair.GA).norm() <= 1e-12 * scale);
}

TEST_CASE("conservative limit: quadratic form vanishes for z = 0")
{
  const auto pair = assemble(make_params(0.0, 0.0, 0.0, 1.0, 1.0), make_mesh(30, 10));
  const int n = 30;
  for (unsigned seed = 0; seed < 20; ++seed)
  {
    Eigen::VectorXd v = random_vector(pair.dim(), seed);
    v.tail(10).setZero();
    const double form = v.dot(pair.GA * v);
    CHECK(std::abs(form) <= 1e-11 * v.squaredNorm() * (2.0 * n));
  }
}

TEST_CASE("Case1 parameters give a nonpositive Rayleigh quotient")
{
  const auto pair = assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), make_mesh(30, 15));
  for (unsigned seed = 0; seed < 100; ++seed)
  {
    const Eigen::VectorXd v = random_vector(pair.dim(), 100 + seed);
    const double rayleigh = v.dot(pair.GA * v) / v.dot(pair.G * v);
    CHECK(rayleigh <= 1e-10);
  }
}

TEST_CASE("v-block of GA is symmetric negative semidefinite without delay coupling")
{
  const auto pair = assemble(make_params(0.2, 0.8, 0.0, 1.0, 0.5), make_mesh(16, 8));
  const int n = 16;
  const Eigen::MatrixXd vv = pair.GA.block(n, n, n, n);
  CHECK((vv - vv.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(vv, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
}

TEST_CASE("pack and unpack round trip")
{
  const Mesh mesh = make_mesh(12, 6);

  SUBCASE("zero state")
  {
    DiscreteState state;
    state.u = Eigen::VectorXd::Zero(12);
    state.v = Eigen::VectorXd::Zero(12);
    state.z = Eigen::VectorXd::Zero(7);
    const Eigen::VectorXd packed = pack(state, mesh);
    CHECK(packed.norm() == 0.0);
    CHECK(pack(unpack(packed, mesh), mesh).norm() == 0.0);
  }

  SUBCASE("random packed vector round-trips bit-exactly")
  {
    const Eigen::VectorXd packed = random_vector(mesh.packed_dim(), 5);
    const Eigen::VectorXd again = pack(unpack(packed, mesh), mesh);
    CHECK((again - packed).norm() == 0.0);
  }

  SUBCASE("w and z0 are derived storage")
  {
    DiscreteState state = unpack(random_vector(mesh.packed_dim(), 6), mesh);
    state.w = 123.0;      // incompatible by hand
    state.z(0) = -456.0;  // dropped by pack
    const DiscreteState rt = unpack(pack(state, mesh), mesh);
    CHECK(rt.w == state.v(11));
    CHECK(rt.z(0) == state.v(11));
  }

  SUBCASE("length mismatch throws")
  {
    CHECK_THROWS_AS(unpack(Eigen::VectorXd::Zero(5), mesh), std::invalid_argument);
  }
}

TEST_CASE("initial_state samples the data")
{
  const Mesh mesh = make_mesh(100, 50);
  SystemParams p = make_params(0.1, 1.0, 0.5, 1.0, 1.0);

  SUBCASE("sin quarter wave with zero history")
  {
    const auto state = initial_state(
        [](double x) { return std::sin(M_PI * x / 2.0); }, [](double) { return 0.0; },
        [](double, double) { return 0.0; }, mesh, p.tau);
    CHECK(state.z.norm() == 0.0);
    // E(0) = 0.5*|u0'|^2, discretized: pi^2/16 up to O(h^2).
    CHECK(energy(state, p, mesh) == doctest::Approx(M_PI * M_PI / 16.0).epsilon(1e-3));
  }

  SUBCASE("unit history carries xi/2 of energy")
  {
    const auto state = initial_state([](double) { return 0.0; }, [](double) { return 0.0; },
                                     [](double, double) { return 1.0; }, mesh, p.tau);
    CHECK(energy(state, p, mesh) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("sin history is sampled exactly")
  {
    const auto state = initial_state([](double) { return 0.0; }, [](double) { return 0.0; },
                                     [](double, double s) { return std::sin(s); }, mesh, p.tau);
    for (int k = 0; k <= mesh.n_rho; ++k)
      CHECK(state.z(k) == std::sin(-p.tau * (k * mesh.d_rho())));
  }

  SUBCASE("Dirichlet-incompatible u0 is rejected")
  {
    CHECK_THROWS_AS(initial_state([](double) { return 1.0; }, [](double) { return 0.0; },
                                  [](double, double) { return 0.0; }, mesh, p.tau),
                    std::invalid_argument);
  }
}

TEST_CASE("lumped mass option keeps the generator well posed")
{
  Mesh mesh = make_mesh(20, 10);
  mesh.lump_mass = true;
  const auto pair = assemble(make_params(0.1, 1.0, 0.5, 1.0, 1.0), mesh);
  const Eigen::MatrixXd M = mass_matrix(mesh);
  CHECK((M - Eigen::MatrixXd(M.diagonal().asDiagonal())).norm() == 0.0);
  for (unsigned seed = 0; seed < 20; ++seed)
  {
    const Eigen::VectorXd v = random_vector(pair.dim(), 200 + seed);
    CHECK(v.dot(pair.GA * v) / v.dot(pair.G * v) <= 1e-10);
  }
}
