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

#include "qequil/matcore.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "qequil/errors.h"

namespace qequil {

namespace {

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag())) return false;
  }
  return true;
}

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  if (!all_finite(m_)) throw InvariantError("HermitianOperator: non-finite entry");
  double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol) {
    throw InvariantError("HermitianOperator: not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityMatrix");
  if (!all_finite(m_)) throw InvariantError("DensityMatrix: non-finite entry");
  double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol) {
    throw InvariantError("DensityMatrix: not Hermitian (defect " + std::to_string(defect) + ")");
  }
  Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvariantError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTol) {
    throw InvariantError("DensityMatrix: negative eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("basis_state: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_populations(const RealVector& populations,
                                              const ComplexMatrix& basis) {
  if (basis.rows() != populations.size() || basis.cols() != populations.size()) {
    throw DimensionError("from_populations: basis and population sizes differ");
  }
  ComplexMatrix m = basis * populations.cast<Complex>().asDiagonal() * basis.adjoint();
  m = (m + m.adjoint()).eval() * 0.5;
  return DensityMatrix(std::move(m));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_bath(const ComplexMatrix& rho, int dim_s, int dim_b) {
  if (dim_s <= 0 || dim_b <= 0 || rho.rows() != rho.cols() ||
      rho.rows() != static_cast<Eigen::Index>(dim_s) * dim_b) {
    throw DimensionError("partial_trace_bath: " + std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + " does not factor as " +
                         std::to_string(dim_s) + " * " + std::to_string(dim_b));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_s, dim_s);
  for (int i = 0; i < dim_s; ++i) {
    for (int j = 0; j < dim_s; ++j) {
      out(i, j) = rho.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    }
  }
  return out;
}

DensityMatrix partial_trace_bath(const DensityMatrix& rho, int dim_s, int dim_b) {
  ComplexMatrix out = partial_trace_bath(rho.matrix(), dim_s, dim_b);
  out = (out + out.adjoint()).eval() * 0.5;
  return DensityMatrix(std::move(out));
}

HermitianSpectrum eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw ConvergenceError("eigh: solver failed", INFINITY);
  HermitianSpectrum out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  ComplexMatrix r = h.matrix() * out.vectors - out.vectors * out.values.cast<Complex>().asDiagonal();
  out.residual = r.colwise().norm().maxCoeff();
  double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
  if (!(out.residual <= 1e-10 * scale)) {
    throw ConvergenceError("eigh: residual " + std::to_string(out.residual), out.residual);
  }
  return out;
}

SpectralDecomposition eig_general(const ComplexMatrix& m, double tol) {
  require_square(m, "eig_general");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceError("eig_general: solver failed", INFINITY);
  SpectralDecomposition out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    double nrm = out.vectors.col(j).norm();
    if (nrm > 0) out.vectors.col(j) /= nrm;
  }
  ComplexMatrix r = m * out.vectors - out.vectors * out.values.asDiagonal();
  out.residual = r.colwise().norm().maxCoeff();
  double scale = std::max(1.0, op2norm(m));
  if (!(out.residual <= tol * scale)) {
    throw ConvergenceError("eig_general: residual " + std::to_string(out.residual), out.residual);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(out.vectors);
  const auto& sv = svd.singularValues();
  double smin = sv(sv.size() - 1);
  out.condition = smin > 0 ? sv(0) / smin : INFINITY;
  out.near_defective = !(out.condition <= kDefectiveCondition);
  return out;
}

ComplexMatrix matrix_exp_herm(const HermitianSpectrum& spectrum, Complex scale) {
  ComplexVector d = (spectrum.values.cast<Complex>() * scale).array().exp();
  return spectrum.vectors * d.asDiagonal() * spectrum.vectors.adjoint();
}

ComplexMatrix matrix_exp_herm(const HermitianOperator& h, Complex scale) {
  return matrix_exp_herm(eigh(h), scale);
}

double trace_norm(const ComplexMatrix& a) {
  require_square(a, "trace_norm");
  if (hermiticity_defect(a) <= 1e-14) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

double op2norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double op2norm(const RealMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<RealMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexVector vec(const ComplexMatrix& a) {
  ComplexVector v(a.size());
  for (Eigen::Index m = 0; m < a.rows(); ++m) {
    for (Eigen::Index n = 0; n < a.cols(); ++n) v(m * a.cols() + n) = a(m, n);
  }
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) throw DimensionError("unvec: length is not n^2");
  ComplexMatrix a(n, n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) a(m, k) = v(m * n + k);
  }
  return a;
}

}  // namespace qequil
