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

#ifndef QEQUIL_HAMILTONIANS_H_
#define QEQUIL_HAMILTONIANS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qequil/matcore.h"
#include "qequil/rng.h"

namespace qequil {

/// A Hermitian block acting on an ordered set of qubits.
struct LocalTerm {
  std::vector<int> support;
  HermitianOperator block;
};

/// Sum of local terms on `n_qubits` qubits; qubit 0 is the most significant
/// tensor factor.
struct LocalHamiltonian {
  int n_qubits = 0;
  int locality_c = 2;  // dimension of every term's block
  std::vector<LocalTerm> terms;

  /// Throws DimensionError on bad supports or block sizes.
  void validate() const;
  int dim() const { return 1 << n_qubits; }
};

/// JSON form: {"n": .., "locality_c": .., "terms": [{"support": [..],
/// "block": [[[re, im], ..], ..]}]}. Parsing throws ConfigError.
std::string hamiltonian_to_json(const LocalHamiltonian& h);
LocalHamiltonian hamiltonian_from_json(const std::string& text);

/// Scale and seed of the uniform local-term measure.
struct SamplingSpec {
  double scale_a = 1.0;
  std::uint64_t seed = 0;
  int locality_c = 4;
};

/// System, bath and coupling of the joint Hamiltonian
/// H_s (x) 1 + 1 (x) H_b + lambda S (x) B, in dense form.
struct JointModel {
  int n = 1;
  int k = 1;
  HermitianOperator h_s;
  HermitianOperator h_b;
  HermitianOperator s_op;
  HermitianOperator b_op;
  double lambda = 0.0;
};

/// Diagonal uniform in [-a, a]; upper entries with modulus uniform in [0, a]
/// and phase uniform in [0, 2 pi).
LocalTerm sample_local_term(const SamplingSpec& spec, const std::vector<int>& support,
                            Stream& stream);

/// Places each block on its support and sums.
HermitianOperator assemble(const LocalHamiltonian& h);

/// One 2-qubit term per qubit pair, or a single 1-qubit term when n = 1.
LocalHamiltonian sample_system(int n, const SamplingSpec& spec);
LocalHamiltonian sample_pair_terms(int n, double a, Stream& stream);

/// One 1-qubit term per qubit.
LocalHamiltonian sample_bath(int k, double a, Stream& stream);

struct SystemDraw {
  LocalHamiltonian h;
  HermitianOperator dense;
  int attempts = 1;
};

/// Redraws until every level spacing is at least `min_gap`; throws
/// DegenerateSpectrumError after `max_attempts`.
SystemDraw sample_nondegenerate_system(int n, double a, double min_gap, Stream& stream,
                                       int max_attempts = 10000);

/// Scale a_b that matches bath and system level widths.
double bath_scale(int n, int k);

/// Ensemble-mean spectral width of the pair-term system ensemble at a = 1.
double ensemble_system_width(int n);

double spectral_width(const LocalHamiltonian& h);
double spectral_width(const HermitianOperator& h);

/// exp(-beta H) / Z, via eigh with the ground energy shifted to zero.
DensityMatrix gibbs_state(const HermitianOperator& h, double beta);
/// Gibbs weights for a list of energies.
RealVector gibbs_weights(const RealVector& energies, double beta);

struct BathGibbs {
  DensityMatrix rho;
  int elementary_operations = 0;
};

/// Product of single-qubit Gibbs states; rejects multi-qubit terms.
BathGibbs bath_gibbs_product(const LocalHamiltonian& h_b, double beta);

/// B - Tr(B rho_b) 1.
HermitianOperator center_bath_operator(const HermitianOperator& b, const DensityMatrix& rho_b);

struct Interaction {
  HermitianOperator s_op;
  HermitianOperator b_op;  // centered against the bath Gibbs state
};

/// Pair-term S on the system and centered pair-term B on the bath, both at a = 1.
Interaction sample_interaction(int n, int k, const DensityMatrix& rho_b, Stream& stream);

/// (prod_i exp(sigma H_i / n_steps))^n_steps.
ComplexMatrix trotter_product(const std::vector<HermitianOperator>& terms, Complex sigma,
                              int n_steps);

int binomial2(int n);

}  // namespace qequil

#endif  // QEQUIL_HAMILTONIANS_H_
