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

#ifndef QEQUIL_OBSERVABLES_H_
#define QEQUIL_OBSERVABLES_H_

#include <utility>
#include <vector>

#include "qequil/matcore.h"
#include "qequil/rng.h"

namespace qequil {

/// original = gain * shifted - shift * 1, with the spectrum of `shifted` in [0, 1].
struct NormalizedObservable {
  HermitianOperator original;
  HermitianOperator shifted;  // O+, the first POVM element
  double shift = 0.0;
  double gain = 1.0;
  double eig_min = 0.0;
  double eig_max = 0.0;

  /// E_1 = O+, E_2 = 1 - O+.
  std::pair<ComplexMatrix, ComplexMatrix> povm() const;
};

/// Throws InvariantError for the zero operator.
NormalizedObservable normalize_observable(const HermitianOperator& o);

struct SamplingPlan {
  double delta = 0.1;
  double epsilon = 0.05;
  long n_samples = 1;
};

/// n = ceil(ln(2 / epsilon) / (2 delta^2)).
SamplingPlan sample_count(double delta, double epsilon);

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;  // delta * |gain|
  double probability = 0.0;  // Tr(O+ rho)
  long successes = 0;
  long samples = 0;
};

/// Simulates plan.n_samples two-outcome POVM shots and maps the hit rate back
/// through (shift, gain).
Estimate estimate_expectation(const DensityMatrix& rho, const HermitianOperator& o,
                              const SamplingPlan& plan, Stream& stream);

/// Groups pairwise-commuting terms (||[A, B]||_2 < 1e-12), greedily in order.
std::vector<std::vector<int>> group_commuting(const std::vector<HermitianOperator>& terms);

/// Estimates sum_i O_i with one POVM per commuting group.
Estimate estimate_local_observable(const DensityMatrix& rho,
                                   const std::vector<HermitianOperator>& terms,
                                   const SamplingPlan& plan, Stream& stream);

/// e^{i H t} O e^{-i H t}.
ComplexMatrix heisenberg(const ComplexMatrix& o, const HermitianOperator& h, double t);

/// Tr(rho [O1, O2(t)]).
Complex correlation_2pt(const DensityMatrix& rho, const HermitianOperator& o1,
                        const HermitianOperator& o2, const HermitianOperator& h_s, double t);

/// Tr(O1(t1) O2(t2) ... Ok(tk) rho).
Complex correlation_kpt(const DensityMatrix& rho, const HermitianOperator& h_s,
                        const std::vector<std::pair<HermitianOperator, double>>& ops);

struct LinearResponse {
  double delta_o2 = 0.0;
  double prediction = 0.0;
  double residual = 0.0;
};

/// Kicks rho by e^{-i lambda O1}, then compares Tr(O2(t) (rho' - rho)) with
/// i lambda Tr(rho [O1, O2(t)]).
LinearResponse linear_response_experiment(const HermitianOperator& h_s, const DensityMatrix& rho_beta,
                                          const HermitianOperator& o1, const HermitianOperator& o2,
                                          double lambda_kick, double t);

}  // namespace qequil

#endif  // QEQUIL_OBSERVABLES_H_
