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

#ifndef QEQUIL_TESTS_UNIT_TEST_UTIL_H_
#define QEQUIL_TESTS_UNIT_TEST_UTIL_H_

#include <cmath>

#include "qequil/matcore.h"
#include "qequil/rng.h"

namespace qequil::testing {

inline ComplexMatrix pauli_x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline ComplexMatrix pauli_y() {
  return (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
inline ComplexMatrix pauli_z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }

inline ComplexMatrix random_complex(int rows, int cols, Stream& s) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(s.normal(), s.normal());
  }
  return m;
}

inline ComplexMatrix random_hermitian(int dim, Stream& s) {
  ComplexMatrix a = random_complex(dim, dim, s);
  return (a + a.adjoint()) / 2.0;
}

// A A^dagger / Tr: full rank with probability one.
inline DensityMatrix random_state(int dim, Stream& s) {
  ComplexMatrix a = random_complex(dim, dim, s);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(ComplexMatrix((rho + rho.adjoint()) / 2.0));
}

// Eigenvalue-free trace norm: sum of singular values by Jacobi SVD.
inline double svd_trace_norm(const ComplexMatrix& a) {
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues().sum();
}

}  // namespace qequil::testing

#endif  // QEQUIL_TESTS_UNIT_TEST_UTIL_H_
