// Copyright 2026 The qequil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QEQUIL_MARKOV2_H_
#define QEQUIL_MARKOV2_H_

#include "qequil/channels.h"
#include "qequil/matcore.h"

namespace qequil {

/// Column-stochastic matrix, entry (m, n) = P(n -> m).
class MarkovMatrix {
 public:
  /// Rejects entries below -1e-12 and column sums off by more than 1e-10.
  explicit MarkovMatrix(RealMatrix p);

  int dim() const { return static_cast<int>(p_.rows()); }
  const RealMatrix& matrix() const { return p_; }
  double operator()(int m, int n) const { return p_(m, n); }

 private:
  RealMatrix p_;
};

/// Outcome distribution of m-bit phase estimation, p(s|n) in row n.
struct PhaseKernel {
  int m_bits = 1;
  double f1 = 1.0;  // E' = f1 E + f2
  double f2 = 0.0;
  RealMatrix p;

  int outcomes() const { return 1 << m_bits; }
  /// Energy whose rescaled phase is exactly 2 pi s / 2^m.
  RealVector outcome_energies() const;
};

/// |sin(M x / 2) / (M sin(x / 2))|^2, equal to 1 at x = 0 mod 2 pi.
double dirichlet_probability(double x, int outcomes);

/// Kernel for phases E' given directly (f1 = 1, f2 = 0).
PhaseKernel phase_kernel_from_phases(const RealVector& phases, int m_bits);

/// Maps [min - slack w / 2, max + slack w / 2] onto [0, 2 pi (1 - 2^-m)], w the
/// spectral range, then evaluates the Dirichlet kernel.
PhaseKernel phase_kernel(const RealVector& energies, int m_bits, double slack = 0.0);

/// Partial-swap chain: P(n -> m) = q_m for downhill moves, q_m e^{-beta dE}
/// uphill, and the column complement on the diagonal.
MarkovMatrix partial_swap_chain(const RealVector& energies, const RealVector& weights, double beta);

/// Partial-swap chain with uniform weights 1/N; rejects repeated energies.
MarkovMatrix exact_chain(const RealVector& energies, double beta);

/// P'(n -> m) = sum_{s,t} p(s|n) P(s -> t) p(m|t), where P(s -> t) is the
/// partial-swap chain on outcome energies weighted by the bath outcome
/// marginal q(t) and p(m|t) is the uniform-prior posterior.
MarkovMatrix approximate_chain(const PhaseKernel& kernel, double beta);

/// Throws AmbiguousFixedPointError when 1 is a repeated eigenvalue.
RealVector stationary_distribution(const MarkovMatrix& p);

struct ChainPerturbation {
  RealMatrix e_matrix;
  RealMatrix y_matrix;
  Complex kappa;
  double e_norm = 0.0;
  double y_norm = 0.0;
  double bound = 0.0;  // infinite when invalid
  bool valid = false;  // |||E|||_2 < |1 - kappa|
  double actual = 0.0;  // ||pi' - pi||_1
  double commute_residual = 0.0;  // |||YP - PY|||_2
  double inverse_residual = 0.0;  // |||Y(1 - P) - (1 - P_inf)|||_2
};

ChainPerturbation chain_perturbation_bound(const MarkovMatrix& p, const MarkovMatrix& p_prime);

struct AlgorithmTwoResult {
  IterationTrace trace;  // diagonal states in the H_s eigenbasis
  RealVector populations;
  RealVector gibbs;
  double deviation_l1 = 0.0;
};

/// Iterates populations under `chain` from `start`, with the same convergence window as iterate_algorithm_one.
AlgorithmTwoResult run_populations(const MarkovMatrix& chain, const RealVector& start,
                                   const RealVector& gibbs, int r_max, double epsilon,
                                   int window = 5);

/// Phase-estimation Gibbs sampler from the completely mixed state with an m-bit kernel.
AlgorithmTwoResult run_algorithm_two(const HermitianOperator& h_s, double beta, int m_bits,
                                     int r_max, double epsilon, int window = 5);

}  // namespace qequil

#endif  // QEQUIL_MARKOV2_H_
