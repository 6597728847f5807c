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

#ifndef QEQUIL_MATCORE_H_
#define QEQUIL_MATCORE_H_

#include <complex>

#include <Eigen/Dense>

namespace qequil {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;

/// Largest |a_ij - conj(a_ji)|; infinity for non-square input.
double hermiticity_defect(const ComplexMatrix& a);

/// True when every entry is finite.
bool all_finite(const ComplexMatrix& a);

/// Square matrix equal to its conjugate transpose within kHermitianTol.
class HermitianOperator {
 public:
  /// Throws InvariantError if `m` is not Hermitian or has non-finite entries.
  explicit HermitianOperator(ComplexMatrix m);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  /// Throws InvariantError on any violated invariant.
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix basis_state(int dim, int index);
  /// diag(populations) rotated by `basis`: sum_n p_n |v_n><v_n|.
  static DensityMatrix from_populations(const RealVector& populations,
                                        const ComplexMatrix& basis);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.
struct HermitianSpectrum {
  RealVector values;
  ComplexMatrix vectors;
  double residual = 0.0;
};

/// Eigenpairs of a general square matrix.
struct SpectralDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;  // unit-norm columns
  double residual = 0.0;  // max ||A v - mu v||_2
  double condition = 1.0;  // 2-norm condition number of `vectors`
  bool near_defective = false;
};

inline constexpr double kDefectiveCondition = 1e8;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr_b over the trailing factor of a (dim_s * dim_b)-dimensional operator.
ComplexMatrix partial_trace_bath(const ComplexMatrix& rho, int dim_s, int dim_b);
DensityMatrix partial_trace_bath(const DensityMatrix& rho, int dim_s, int dim_b);

/// Throws ConvergenceError if the residual exceeds 1e-10 * max(1, ||h||).
HermitianSpectrum eigh(const HermitianOperator& h);

/// Throws ConvergenceError if the residual exceeds tol * max(1, ||m||).
SpectralDecomposition eig_general(const ComplexMatrix& m, double tol = 1e-8);

/// V exp(scale * Lambda) V^dagger.
ComplexMatrix matrix_exp_herm(const HermitianOperator& h, Complex scale);
ComplexMatrix matrix_exp_herm(const HermitianSpectrum& spectrum, Complex scale);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& a);
/// Largest singular value.
double op2norm(const ComplexMatrix& a);
double op2norm(const RealMatrix& a);

/// Row-major vectorization, (m, n) -> m * N + n.
ComplexVector vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexVector& v, int n);

}  // namespace qequil

#endif  // QEQUIL_MATCORE_H_
