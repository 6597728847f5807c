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

#ifndef QEQUIL_CHANNELS_H_
#define QEQUIL_CHANNELS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "qequil/hamiltonians.h"
#include "qequil/matcore.h"

namespace qequil {

inline constexpr int kDefaultMaxQubits = 12;

/// Linear map on N x N operators as an N^2 x N^2 matrix in the row-major
/// vectorization: S_{mn,kl} = <m| S(|k><l|) |n>.
class Superoperator {
 public:
  /// Validates trace and Hermiticity preservation within 1e-10.
  Superoperator(int dim_n, ComplexMatrix matrix);

  static Superoperator identity(int dim_n);
  /// chi -> U chi U^dagger.
  static Superoperator unitary_conjugation(const ComplexMatrix& u);
  /// chi -> Tr(chi) 1/N.
  static Superoperator depolarizing(int dim_n);
  /// Populations move by the column-stochastic `p`; coherences are erased.
  static Superoperator classical(const RealMatrix& p);

  int dim_n() const { return n_; }
  const ComplexMatrix& matrix() const { return m_; }

  ComplexMatrix apply(const ComplexMatrix& chi) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  int n_;
  ComplexMatrix m_;
};

/// Unvalidated N^2 x N^2 map with the same indexing as Superoperator.
struct OperatorMap {
  int dim_n = 0;
  ComplexMatrix matrix;

  ComplexMatrix apply(const ComplexMatrix& chi) const;
};

/// The same map written for operators expressed in the basis given by the
/// columns of unitary `v` (chi' = v^dagger chi v).
ComplexMatrix superop_in_basis(const ComplexMatrix& superop, const ComplexMatrix& v);

/// Choi matrix C[(k,m),(l,n)] = S_{mn,kl}.
ComplexMatrix choi_matrix(const ComplexMatrix& superop, int dim_n);

HermitianOperator build_joint_hamiltonian(const JointModel& model,
                                          int max_qubits = kDefaultMaxQubits);

/// Caches the joint and bath eigendecompositions so that S_{lambda,t} can be
/// evaluated at many times for one model.
class ChannelBuilder {
 public:
  ChannelBuilder(const JointModel& model, double beta, int max_qubits = kDefaultMaxQubits);

  /// chi -> Tr_b[e^{iHt} (chi (x) rho_b) e^{-iHt}].
  Superoperator at(double t) const;

  const DensityMatrix& bath_state() const { return rho_b_; }
  int dim_n() const { return n_; }

 private:
  int n_;
  int k_dim_;
  HermitianSpectrum joint_;
  RealVector bath_weights_;
  ComplexMatrix x_;  // V^dagger (1 (x) W)
  DensityMatrix rho_b_;
};

Superoperator build_superoperator(const JointModel& model, double t, double beta);

struct TcpDiagnostics {
  double column_sum_error = 0.0;  // max |sum_m S_{mm,nn} - 1|
  double cross_sum_error = 0.0;  // max_{k != l} |sum_m S_{mm,kl}|
  double hermiticity_error = 0.0;  // max |S(chi^dagger) - S(chi)^dagger| over matrix units
  double spectral_radius = 0.0;
  double spectral_radius_excess = 0.0;  // max(0, radius - 1)
  double conjugate_pairing_error = 0.0;
  double choi_min_eigenvalue = 0.0;
  double positivity_min_eigenvalue = 0.0;  // over random density inputs

  /// Largest of the violations, with negative eigenvalues counted as violations.
  double worst() const;
};

TcpDiagnostics verify_tcp(const Superoperator& s, std::uint64_t probe_seed = 0,
                          int probes = 8);

struct ChannelSpectrum {
  SpectralDecomposition decomposition;
  DensityMatrix fixed_point;
  Complex kappa;
  bool defective = false;
  double fixed_point_residual = 0.0;  // ||S(rho_0) - rho_0||_tr
};

inline constexpr double kUnitEigenvalueTol = 1e-9;

/// Throws AmbiguousFixedPointError if two eigenvalues lie within 1e-9 of 1.
ChannelSpectrum channel_spectrum(const Superoperator& s);

/// Solves (S - 1) v = 0 with the trace row imposed; no uniqueness check.
DensityMatrix channel_fixed_point(const Superoperator& s);

struct IterationTrace {
  std::vector<DensityMatrix> states;
  std::vector<double> deltas;
  std::vector<double> observable_series;
  bool converged = false;
  int converged_round = -1;
  double final_delta = 0.0;
};

/// Throws ConvergenceError carrying the final delta if the trace did not converge.
void require_converged(const IterationTrace& trace);

/// Applies `s` until `window` consecutive rounds move the state by at most
/// `epsilon` in trace norm, or `r_max` rounds have run.
IterationTrace iterate_channel(const Superoperator& s, const DensityMatrix& start, int r_max,
                               double epsilon,
                               const std::optional<HermitianOperator>& observable = std::nullopt,
                               int window = 5);

/// Repeated interactions from |0...0><0...0| with a fresh thermal bath each round.
IterationTrace iterate_algorithm_one(const JointModel& model, double t, double beta, int r_max,
                                     double epsilon,
                                     const std::optional<HermitianOperator>& observable =
                                         std::nullopt,
                                     int window = 5);

struct ConvergenceBound {
  std::vector<double> distances;  // ||S^r(rho) - rho_0||_tr, r = 0..r_max
  double kappa_abs = 0.0;
  double fitted_constant = 0.0;  // fitted on the first half of the rounds
  bool bound_holds = true;  // C r |kappa|^r dominates on the second half
  double slope = 0.0;  // least-squares slope of log distance over the fit window
  double log_kappa = 0.0;
  double last_ratio = 0.0;  // d_r / d_{r-1} at the last resolvable round
};

ConvergenceBound convergence_bound_check(const Superoperator& s, const DensityMatrix& rho,
                                         int r_max, int fit_from = -1);

/// (1/a) sum_{s=0}^{a-1} e^{i H_s s} rho e^{-i H_s s}.
DensityMatrix dephase(const DensityMatrix& rho, const HermitianOperator& h_s, int a);

}  // namespace qequil

#endif  // QEQUIL_CHANNELS_H_
