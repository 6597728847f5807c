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

#include "qequil/observables.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qequil/errors.h"

namespace qequil {

std::pair<ComplexMatrix, ComplexMatrix> NormalizedObservable::povm() const {
  const int n = shifted.dim();
  return {shifted.matrix(), ComplexMatrix::Identity(n, n) - shifted.matrix()};
}

NormalizedObservable normalize_observable(const HermitianOperator& o) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(o.matrix(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (std::max(std::abs(lo), std::abs(hi)) == 0.0) {
    throw InvariantError("normalize_observable: zero operator");
  }
  const int n = o.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  double shift = 0.0, gain = 1.0;
  if (lo < 0 && hi > 0) {
    shift = -lo;
    gain = hi - lo;
  } else if (lo >= 0) {
    gain = hi;
  } else {
    gain = lo;
  }
  ComplexMatrix shifted = (o.matrix() + shift * id) / gain;
  shifted = (shifted + shifted.adjoint()).eval() * 0.5;
  return NormalizedObservable{o, HermitianOperator(std::move(shifted)), shift, gain, lo, hi};
}

SamplingPlan sample_count(double delta, double epsilon) {
  if (!(delta > 0 && delta < 1)) throw InvariantError("sample_count: delta must be in (0, 1)");
  if (!(epsilon > 0 && epsilon < 1)) throw InvariantError("sample_count: epsilon must be in (0, 1)");
  double n = std::ceil(std::log(2.0 / epsilon) / (2.0 * delta * delta));
  return SamplingPlan{delta, epsilon, std::max(1L, static_cast<long>(n))};
}

namespace {

Estimate estimate_normalized(const DensityMatrix& rho, const NormalizedObservable& norm,
                             const SamplingPlan& plan, Stream& stream) {
  if (rho.dim() != norm.original.dim()) throw DimensionError("estimate: dimension mismatch");
  if (plan.n_samples < 1) throw InvariantError("estimate: n_samples must be >= 1");
  double p = (norm.shifted.matrix() * rho.matrix()).trace().real();
  if (p < -1e-9 || p > 1 + 1e-9) {
    throw NumericalError("estimate: POVM probability " + std::to_string(p) + " outside [0, 1]");
  }
  p = std::clamp(p, 0.0, 1.0);
  std::bernoulli_distribution shot(p);
  long hits = 0;
  for (long i = 0; i < plan.n_samples; ++i) hits += shot(stream) ? 1 : 0;
  Estimate e;
  e.probability = p;
  e.successes = hits;
  e.samples = plan.n_samples;
  e.value = norm.gain * (static_cast<double>(hits) / plan.n_samples) - norm.shift;
  e.half_width = plan.delta * std::abs(norm.gain);
  return e;
}

}  // namespace

Estimate estimate_expectation(const DensityMatrix& rho, const HermitianOperator& o,
                              const SamplingPlan& plan, Stream& stream) {
  return estimate_normalized(rho, normalize_observable(o), plan, stream);
}

std::vector<std::vector<int>> group_commuting(const std::vector<HermitianOperator>& terms) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(terms.size()); ++i) {
    bool placed = false;
    for (auto& g : groups) {
      bool ok = std::all_of(g.begin(), g.end(), [&](int j) {
        const ComplexMatrix& a = terms[i].matrix();
        const ComplexMatrix& b = terms[j].matrix();
        return op2norm(ComplexMatrix(a * b - b * a)) < 1e-12;
      });
      if (ok) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

Estimate estimate_local_observable(const DensityMatrix& rho,
                                   const std::vector<HermitianOperator>& terms,
                                   const SamplingPlan& plan, Stream& stream) {
  if (terms.empty()) throw InvariantError("estimate_local_observable: no terms");
  Estimate total;
  for (const auto& g : group_commuting(terms)) {
    ComplexMatrix sum = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (int i : g) sum += terms[i].matrix();
    sum = (sum + sum.adjoint()).eval() * 0.5;
    Estimate e = estimate_expectation(rho, HermitianOperator(std::move(sum)), plan, stream);
    total.value += e.value;
    total.half_width += e.half_width;
    total.successes += e.successes;
    total.samples += e.samples;
  }
  return total;
}

ComplexMatrix heisenberg(const ComplexMatrix& o, const HermitianOperator& h, double t) {
  if (o.rows() != h.dim()) throw DimensionError("heisenberg: dimension mismatch");
  ComplexMatrix u = matrix_exp_herm(h, Complex(0.0, t));
  return u * o * u.adjoint();
}

Complex correlation_2pt(const DensityMatrix& rho, const HermitianOperator& o1,
                        const HermitianOperator& o2, const HermitianOperator& h_s, double t) {
  if (rho.dim() != o1.dim() || rho.dim() != o2.dim() || rho.dim() != h_s.dim()) {
    throw DimensionError("correlation_2pt: dimension mismatch");
  }
  ComplexMatrix b = heisenberg(o2.matrix(), h_s, t);
  ComplexMatrix comm = o1.matrix() * b - b * o1.matrix();
  return (rho.matrix() * comm).trace();
}

Complex correlation_kpt(const DensityMatrix& rho, const HermitianOperator& h_s,
                        const std::vector<std::pair<HermitianOperator, double>>& ops) {
  if (ops.empty()) throw InvariantError("correlation_kpt: need at least one operator");
  HermitianSpectrum spec = eigh(h_s);
  const int n = rho.dim();
  ComplexMatrix prod = ComplexMatrix::Identity(n, n);
  for (const auto& [op, t] : ops) {
    if (op.dim() != n) throw DimensionError("correlation_kpt: dimension mismatch");
    ComplexMatrix u = matrix_exp_herm(spec, Complex(0.0, t));
    prod = prod * (u * op.matrix() * u.adjoint());
  }
  return (prod * rho.matrix()).trace();
}

LinearResponse linear_response_experiment(const HermitianOperator& h_s, const DensityMatrix& rho_beta,
                                          const HermitianOperator& o1, const HermitianOperator& o2,
                                          double lambda_kick, double t) {
  ComplexMatrix kick = matrix_exp_herm(o1, Complex(0.0, -lambda_kick));
  ComplexMatrix kicked = kick * rho_beta.matrix() * kick.adjoint();
  ComplexMatrix o2t = heisenberg(o2.matrix(), h_s, t);
  LinearResponse r;
  r.delta_o2 = (o2t * (kicked - rho_beta.matrix())).trace().real();
  r.prediction = (Complex(0.0, lambda_kick) * correlation_2pt(rho_beta, o1, o2, h_s, t)).real();
  r.residual = std::abs(r.delta_o2 - r.prediction);
  return r;
}

}  // namespace qequil
