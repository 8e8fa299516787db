// SPDX-License-Identifier: Apache-2.0

#include "delaywave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace delaywave
{

SpectrumReport spectrum(const GeneratorPair& pair, int dense_cap)
{
  if (pair.dim() > dense_cap)
    throw std::invalid_argument("spectrum: packed dimension " + std::to_string(pair.dim()) +
                                " exceeds the dense cap " + std::to_string(dense_cap) +
                                "; reduce n_cells/n_rho");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(pair.A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectrum: dense eigensolver did not converge");

  SpectrumReport report;
  const auto& values = solver.eigenvalues();
  report.eigenvalues.assign(values.data(), values.data() + values.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real())
                return a.real() > b.real();
              return a.imag() > b.imag();
            });
  report.abscissa = report.eigenvalues.front().real();
  report.n_unstable = static_cast<int>(
      std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(),
                    [](const std::complex<double>& v) { return v.real() > 0.0; }));
  return report;
}

DissipativityReport dissipativity_certificate(const GeneratorPair& pair, int n_samples,
                                              std::uint64_t seed)
{
  if (n_samples < 1)
    throw std::invalid_argument("dissipativity_certificate: n_samples must be >= 1");

  const int dim = pair.dim();
  DissipativityReport report;

  double sampled_max = -std::numeric_limits<double>::infinity();
#pragma omp parallel
  {
    double local_max = -std::numeric_limits<double>::infinity();
#pragma omp for schedule(static) nowait
    for (int i = 0; i < n_samples; ++i)
    {
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1)));
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd v(dim);
      for (int j = 0; j < dim; ++j)
        v(j) = normal(rng);
      const double num = v.dot(pair.GA * v);
      const double den = v.dot(pair.G * v);
      local_max = std::max(local_max, num / den);
    }
#pragma omp critical
    sampled_max = std::max(sampled_max, local_max);
  }
  report.sampled_max = sampled_max;

  // Exact maximum of the symmetrized pencil. The u-row/column of sym(GA) cancels
  // identically (K against -K), so the pencil reduces to the (v, z) block; the
  // u-directions contribute the eigenvalue 0 exactly.
  const int n = pair.mesh.n_cells;
  const int rest = pair.dim() - n;
  const Eigen::MatrixXd GA_br = pair.GA.bottomRightCorner(rest, rest);
  const Eigen::MatrixXd S = 0.5 * (GA_br + GA_br.transpose());
  const Eigen::MatrixXd G_br = pair.G.bottomRightCorner(rest, rest);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      S, G_br, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dissipativity_certificate: pencil eigensolve failed");
  report.exact_max = std::max(0.0, solver.eigenvalues().maxCoeff());
  return report;
}

ResolventReport resolvent_test(const GeneratorPair& pair, double lambda, int trials,
                               std::uint64_t seed)
{
  if (!(lambda > 0.0))
    throw std::invalid_argument("resolvent_test: lambda must be positive");
  if (trials < 1)
    throw std::invalid_argument("resolvent_test: trials must be >= 1");

  const int dim = pair.dim();
  const Eigen::MatrixXd system = lambda * pair.G - pair.GA;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

  auto solve_refined = [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd x = lu.solve(rhs);
    for (int it = 0; it < 2; ++it)
    {
      const Eigen::VectorXd r = rhs - system * x;
      x += lu.solve(r);
    }
    if (!x.allFinite())
      throw std::runtime_error("resolvent_test: singular system at lambda > 0 "
                               "(contradicts surjectivity; assembly bug?)");
    return x;
  };
  auto g_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(pair.G * v)); };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_vector = [&]() {
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j)
      v(j) = normal(rng);
    return v;
  };

  ResolventReport report;
  for (int trial = 0; trial < trials; ++trial)
  {
    const Eigen::VectorXd F = random_vector();
    const Eigen::VectorXd V = solve_refined(pair.G * F);
    const Eigen::VectorXd defect = lambda * V - pair.A * V - F;
    report.max_random_residual =
        std::max(report.max_random_residual, g_norm(defect) / g_norm(F));
  }

  const Eigen::VectorXd target = random_vector().normalized();
  const Eigen::VectorXd F_manufactured = lambda * target - pair.A * target;
  const Eigen::VectorXd recovered = solve_refined(pair.G * F_manufactured);
  report.manufactured_error = (recovered - target).norm() / target.norm();
  return report;
}

}  // namespace delaywave
