// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_SPECTRAL_HPP
#define DELAYWAVE_SPECTRAL_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "delaywave/discretization.hpp"

namespace delaywave
{

struct SpectrumReport
{
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part, descending
  double abscissa = 0.0;                          // max real part
  int n_unstable = 0;                             // count with real part > 0
  std::optional<double> gap_to_fit;               // |2*|abscissa| - gamma_hat| when known
};

struct DissipativityReport
{
  double sampled_max = 0.0;  // max Rayleigh quotient <AV,V>_G/<V,V>_G over random states
  double exact_max = 0.0;    // largest eigenvalue of (sym(GA), G)
};

struct ResolventReport
{
  double max_random_residual = 0.0;  // |(lambda I - A)V - F|_G / |F|_G over random F
  double manufactured_error = 0.0;   // relative recovery error of a manufactured V*
};

// Dense eigensolve of the packed generator. Dimensions above dense_cap are
// rejected with a message instructing mesh reduction.
SpectrumReport spectrum(const GeneratorPair& pair, int dense_cap = 1200);

// Numerical dissipativity certificate. The exact maximum exploits the exact block
// structure of sym(GA): its u-row/column vanishes identically, so the pencil
// reduces to the (v, z) block against the corresponding Gram block.
DissipativityReport dissipativity_certificate(const GeneratorPair& pair, int n_samples,
                                              std::uint64_t seed);

// Surjectivity check of (lambda*I - A) at lambda > 0: solves (lambda*G - GA)V = G*F
// for random F and for a manufactured solution.
ResolventReport resolvent_test(const GeneratorPair& pair, double lambda, int trials,
                               std::uint64_t seed);

}  // namespace delaywave

#endif  // DELAYWAVE_SPECTRAL_HPP
