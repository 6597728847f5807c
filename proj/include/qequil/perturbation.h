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

#ifndef QEQUIL_PERTURBATION_H_
#define QEQUIL_PERTURBATION_H_

#include <functional>
#include <string>
#include <vector>

#include "qequil/channels.h"
#include "qequil/hamiltonians.h"
#include "qequil/matcore.h"

namespace qequil {

/// (S - S0_t) / lambda^2 in the H_s eigenbasis, where S0_t is conjugation by
/// e^{i H_s t}. Zero column sums, so not a Superoperator.
OperatorMap extract_s2bar(const Superoperator& s, const HermitianOperator& h_s, double t,
                          double lambda);

struct SectorAnalysis {
  ComplexMatrix d_block;  // D-sector block of the second-order map, (m, n) -> [mm, nn]
  RealMatrix p_matrix;  // populations transfer matrix 1 + lambda^2 d_block
  ComplexMatrix nd_eigenvalues;  // (n, m) for n != m; diagonal unused and set to 1
  double kappa_d = 1.0;
  double kappa_nd = 1.0;
  RealVector fixed_populations;
  DensityMatrix perturbative_fixed_point = DensityMatrix::maximally_mixed(1);  // H_s eigenbasis
  double rate_d = 0.0;
  double rate_nd = 0.0;
  bool d_block_defective = false;
  bool fixed_point_unique = true;
};

/// `energies` must be ascending with level spacing above 1e-8. When the D-block
/// has several unit eigenvalues the fixed point is lim P^r applied to
/// `start_populations` (uniform if empty). Rates are 0 when c_bar is 0.
SectorAnalysis sector_analysis(const OperatorMap& s2bar, const RealVector& energies,
                               double lambda, double t, double c_bar,
                               const RealVector& start_populations = RealVector());

/// Same analysis read directly off S_{lambda,t} written in the H_s eigenbasis.
SectorAnalysis sector_analysis_exact(const ComplexMatrix& s_eigenbasis, const RealVector& energies,
                                     double c_bar,
                                     const RealVector& start_populations = RealVector());

struct CorrelationPeak {
  double omega;
  double weight;
};

/// Finite-bath spectral density: h~(w) = sum_p weight_p delta(w - omega_p), so
/// h(t) = <B B_t> = sum_p weight_p e^{i omega_p t}. Peaks sit at w_l - w_k
/// with weight p_k |B_kl|^2 over bath eigenpairs.
struct BathCorrelation {
  std::vector<CorrelationPeak> peaks;

  Complex h(double t) const;
  double total_weight() const;
  /// Largest |W(-w) - e^{-beta w} W(w)| over peak frequencies, W the summed
  /// weight at a frequency (frequencies matched within 1e-9).
  double kms_error(double beta) const;
};

BathCorrelation bath_correlation(const HermitianOperator& h_b, const HermitianOperator& b_op,
                                 double beta);
BathCorrelation bath_correlation(const LocalHamiltonian& h_b, const HermitianOperator& b_op,
                                 double beta);

struct SecondOrder {
  RealMatrix q;  // Q_{mn,t}
  ComplexMatrix nu;  // nu_{nm,t}, diagonal unused
};

/// (1 - cos tx) / x^2 and (tx - sin tx) / x^2 with their small-x limits.
double cos_kernel(double x, double t);
double sin_kernel(double x, double t);

/// Finite-time second-order D-block Q and decay factors nu. `s_eig` is the
/// system coupling in the H_s eigenbasis.
SecondOrder second_order_Q_nu(const RealVector& energies, const ComplexMatrix& s_eig,
                              const BathCorrelation& corr, double t);

/// Smooth bath spectral density; `support` bounds where it is non-negligible
/// (infinite when it does not decay).
struct SpectralDensity {
  std::function<double(double)> fn;
  double support = 0.0;

  double operator()(double w) const { return fn(w); }
};

/// exp(beta w / 2 - w^2 / (2 sigma^2)); KMS at inverse temperature beta.
SpectralDensity gaussian_kms_density(double beta, double sigma = 1.0, double scale = 1.0);
/// exp(beta w / 2) sech(w); integrable for beta < 2.
SpectralDensity sech_kms_density(double beta, double scale = 1.0);

/// P int h(w) / (w - a) dw by symmetric quadrature around the pole.
double principal_value(const SpectralDensity& h, double a);

struct ValidityMargins {
  double condition1 = 0.0;  // max_n lambda^2 t 2 pi sum_l |S_ln|^2 h~(E_n - E_l)
  double condition2 = 0.0;
};

struct IdealizedKernel {
  RealMatrix p_matrix;
  ComplexMatrix mu_offdiag;  // mu_{nm}, diagonal unused and set to 1
  SpectralDensity htilde;
  ValidityMargins conditions;
  double detailed_balance_error = 0.0;
  double kms_error = 0.0;
  std::vector<std::string> warnings;
};

/// Davies-limit populations matrix and decay factors. `t` only sets the
/// free phase e^{it(E_n - E_m)} of mu. Throws InvariantError if `htilde`
/// fails the KMS relation or the result fails detailed balance.
IdealizedKernel idealized_limit(const RealVector& energies, const ComplexMatrix& s_eig,
                                const SpectralDensity& htilde, double beta, double lambda2t,
                                double t = 0.0);

struct Validity {
  double c = 0.0;  // n > 1 prefactor (0 at n = 1)
  double c1 = 0.0;  // n = 1 prefactor
  double beta_prime = 0.0;

  double effective(int n) const { return n == 1 ? c1 : c; }
};

/// c and c1 at lambda^2 t, and beta' = beta W_s with W_s the ensemble width.
Validity validity_conditions(int n, int k, double lambda, double t, double beta = 0.0);
/// c(t) / (lambda^2 t) for the given sizes.
double validity_prefactor(int n, int k);

struct ZenoProbe {
  std::vector<double> times;
  std::vector<double> lambdas;
  std::vector<double> distances;  // ||rho_0 - 1/N||_tr
  std::vector<double> mixed_residuals;  // ||S(1/N) - 1/N||_tr
  bool shares_eigenspace = false;
  bool assertion_enabled = true;
  bool decreasing = false;
};

/// Holds lambda^2 t fixed along `schedule` (descending t).
ZenoProbe inverse_zeno_probe(const JointModel& model, double lambda2t, double beta,
                             const std::vector<double>& schedule);

}  // namespace qequil

#endif  // QEQUIL_PERTURBATION_H_
