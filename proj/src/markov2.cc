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

#include "qequil/markov2.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qequil/errors.h"
#include "qequil/hamiltonians.h"

namespace qequil {

MarkovMatrix::MarkovMatrix(RealMatrix p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols() || p_.rows() == 0) throw DimensionError("MarkovMatrix: must be square");
  if (!p_.allFinite()) throw InvariantError("MarkovMatrix: non-finite entry");
  if (p_.minCoeff() < -1e-12) {
    throw InvariantError("MarkovMatrix: negative entry " + std::to_string(p_.minCoeff()));
  }
  double err = (p_.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (err > 1e-10) throw InvariantError("MarkovMatrix: column sum error " + std::to_string(err));
}

RealVector PhaseKernel::outcome_energies() const {
  const int mo = outcomes();
  RealVector e(mo);
  for (int s = 0; s < mo; ++s) e(s) = (2.0 * M_PI * s / mo - f2) / f1;
  return e;
}

double dirichlet_probability(double x, int outcomes) {
  double r = std::remainder(x, 2.0 * M_PI);
  const double mo = outcomes;
  if (std::abs(r) < 1e-7) return 1.0 - (mo * mo - 1.0) * r * r / 12.0;
  double v = std::sin(0.5 * mo * r) / (mo * std::sin(0.5 * r));
  return v * v;
}

PhaseKernel phase_kernel_from_phases(const RealVector& phases, int m_bits) {
  if (m_bits < 1 || m_bits > 20) throw InvariantError("phase_kernel: m_bits must be in [1, 20]");
  if (!phases.allFinite()) throw InvariantError("phase_kernel: non-finite phase");
  PhaseKernel k;
  k.m_bits = m_bits;
  const int mo = k.outcomes();
  k.p.resize(phases.size(), mo);
  for (Eigen::Index n = 0; n < phases.size(); ++n) {
    for (int s = 0; s < mo; ++s) k.p(n, s) = dirichlet_probability(phases(n) - 2.0 * M_PI * s / mo, mo);
  }
  return k;
}

PhaseKernel phase_kernel(const RealVector& energies, int m_bits, double slack) {
  if (!energies.allFinite()) throw InvariantError("phase_kernel: non-finite energy");
  if (!(slack >= 0)) throw InvariantError("phase_kernel: slack must be >= 0");
  double lo = energies.minCoeff(), hi = energies.maxCoeff();
  double width = hi - lo;
  if (!(width > 0)) throw DegenerateSpectrumError("phase_kernel: all energies equal; rescale undefined");
  lo -= 0.5 * slack * width;
  width *= 1.0 + slack;
  const double top = 2.0 * M_PI * (1.0 - std::ldexp(1.0, -m_bits));
  const double f1 = top / width;
  const double f2 = -f1 * lo;
  RealVector phases = (f1 * energies.array() + f2).matrix();
  PhaseKernel k = phase_kernel_from_phases(phases, m_bits);
  k.f1 = f1;
  k.f2 = f2;
  return k;
}

MarkovMatrix partial_swap_chain(const RealVector& energies, const RealVector& weights, double beta) {
  if (!(beta >= 0)) throw InvariantError("partial_swap_chain: beta must be >= 0");
  const Eigen::Index n = energies.size();
  if (weights.size() != n) throw DimensionError("partial_swap_chain: weights and energies differ in size");
  RealMatrix p = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double off = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == k) continue;
      double de = energies(m) - energies(k);
      p(m, k) = weights(m) * (de <= 0 ? 1.0 : std::exp(-beta * de));
      off += p(m, k);
    }
    p(k, k) = 1.0 - off;
  }
  return MarkovMatrix(std::move(p));
}

MarkovMatrix exact_chain(const RealVector& energies, double beta) {
  RealVector sorted = energies;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  for (Eigen::Index i = 1; i < sorted.size(); ++i) {
    if (sorted(i) == sorted(i - 1)) throw DegenerateSpectrumError("exact_chain: repeated energy");
  }
  const Eigen::Index n = energies.size();
  return partial_swap_chain(energies, RealVector::Constant(n, 1.0 / n), beta);
}

MarkovMatrix approximate_chain(const PhaseKernel& kernel, double beta) {
  const Eigen::Index n = kernel.p.rows();
  const int mo = kernel.outcomes();
  if (kernel.p.cols() != mo) throw DimensionError("approximate_chain: kernel has wrong outcome count");
  RealVector q = kernel.p.colwise().sum().transpose() / static_cast<double>(n);
  MarkovMatrix outcome_chain = partial_swap_chain(kernel.outcome_energies(), q, beta);
  RealMatrix posterior = RealMatrix::Zero(n, mo);  // p(m|t)
  for (int t = 0; t < mo; ++t) {
    if (q(t) > 0) posterior.col(t) = kernel.p.col(t) / (n * q(t));
  }
  RealMatrix p = posterior * outcome_chain.matrix() * kernel.p.transpose();
  return MarkovMatrix(std::move(p));
}

RealVector stationary_distribution(const MarkovMatrix& chain) {
  const RealMatrix& p = chain.matrix();
  const Eigen::Index n = p.rows();
  Eigen::EigenSolver<RealMatrix> es(p, false);
  int near_one = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i) - 1.0) < kUnitEigenvalueTol) ++near_one;
  }
  if (near_one >= 2) {
    throw AmbiguousFixedPointError("stationary_distribution: " + std::to_string(near_one) +
                                   " unit eigenvalues");
  }
  RealMatrix a = p - RealMatrix::Identity(n, n);
  a.row(0).setOnes();
  RealVector rhs = RealVector::Zero(n);
  rhs(0) = 1.0;
  auto lu = a.fullPivLu();
  RealVector pi = lu.solve(rhs);
  pi += lu.solve(rhs - a * pi);  // one refinement step
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

ChainPerturbation chain_perturbation_bound(const MarkovMatrix& p, const MarkovMatrix& p_prime) {
  const int n = p.dim();
  if (p_prime.dim() != n) throw DimensionError("chain_perturbation_bound: dimension mismatch");
  ChainPerturbation out;
  RealVector pi = stationary_distribution(p);
  RealMatrix p_inf = pi * RealVector::Ones(n).transpose();
  RealMatrix id = RealMatrix::Identity(n, n);
  out.e_matrix = p_prime.matrix() - p.matrix();
  out.y_matrix = (id - p.matrix() + p_inf).inverse() - p_inf;
  out.commute_residual = op2norm(RealMatrix(out.y_matrix * p.matrix() - p.matrix() * out.y_matrix));
  out.inverse_residual = op2norm(RealMatrix(out.y_matrix * (id - p.matrix()) - (id - p_inf)));

  Eigen::EigenSolver<RealMatrix> es(p.matrix(), false);
  Eigen::Index unit = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(unit) - 1.0)) unit = i;
  }
  out.kappa = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != unit && std::abs(es.eigenvalues()(i)) > std::abs(out.kappa)) out.kappa = es.eigenvalues()(i);
  }
  out.e_norm = op2norm(out.e_matrix);
  out.y_norm = op2norm(out.y_matrix);
  double ratio = out.e_norm / std::abs(1.0 - out.kappa);
  out.valid = ratio < 1.0;
  out.bound = out.valid ? std::sqrt(static_cast<double>(n)) * ratio / (1.0 - ratio)
                        : std::numeric_limits<double>::infinity();
  out.actual = (stationary_distribution(p_prime) - pi).cwiseAbs().sum();
  return out;
}

AlgorithmTwoResult run_populations(const MarkovMatrix& chain, const RealVector& start,
                                   const RealVector& gibbs, int r_max, double epsilon, int window) {
  const int n = chain.dim();
  if (start.size() != n || gibbs.size() != n) throw DimensionError("run_populations: size mismatch");
  if (r_max < 1) throw InvariantError("run_populations: r_max must be >= 1");
  if (window < 1) throw InvariantError("run_populations: window must be >= 1");
  const ComplexMatrix basis = ComplexMatrix::Identity(n, n);
  AlgorithmTwoResult out;
  RealVector pop = start;
  out.trace.states.push_back(DensityMatrix::from_populations(pop, basis));
  int run = 0;
  for (int r = 0; r < r_max; ++r) {
    RealVector next = chain.matrix() * pop;
    next /= next.sum();
    double delta = (next - pop).cwiseAbs().sum();
    pop = next;
    out.trace.deltas.push_back(delta);
    out.trace.states.push_back(DensityMatrix::from_populations(pop, basis));
    run = delta <= epsilon ? run + 1 : 0;
    if (run >= window) {
      out.trace.converged = true;
      out.trace.converged_round = std::max(1, r + 1 - window);
      break;
    }
  }
  out.trace.final_delta = out.trace.deltas.back();
  out.populations = pop;
  out.gibbs = gibbs;
  out.deviation_l1 = (pop - gibbs).cwiseAbs().sum();
  return out;
}

AlgorithmTwoResult run_algorithm_two(const HermitianOperator& h_s, double beta, int m_bits,
                                     int r_max, double epsilon, int window) {
  HermitianSpectrum spec = eigh(h_s);
  for (Eigen::Index i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values(i) - spec.values(i - 1) > 1e-8)) {
      throw DegenerateSpectrumError("run_algorithm_two: degenerate spectrum");
    }
  }
  MarkovMatrix chain = approximate_chain(phase_kernel(spec.values, m_bits), beta);
  const int n = h_s.dim();
  return run_populations(chain, RealVector::Constant(n, 1.0 / n), gibbs_weights(spec.values, beta),
                         r_max, epsilon, window);
}

}  // namespace qequil
