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

#include "qequil/channels.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "qequil/errors.h"
#include "qequil/hamiltonians.h"
#include "test_util.h"

namespace qequil {
namespace {

using testing::pauli_x;
using testing::pauli_z;
using testing::random_hermitian;
using testing::random_state;

JointModel random_model(int n, int k, double lambda, double beta, Stream& s) {
  HermitianOperator hs = assemble(sample_pair_terms(n, 1.0, s));
  HermitianOperator hb = assemble(sample_bath(k, bath_scale(n, k), s));
  Interaction in = sample_interaction(n, k, gibbs_state(hb, beta), s);
  return JointModel{n, k, hs, hb, in.s_op, in.b_op, lambda};
}

// Probes every matrix unit through a dense Pade exponential.
ComplexMatrix brute_force_channel(const JointModel& m, double t, double beta) {
  const int dn = 1 << m.n, dk = 1 << m.k;
  ComplexMatrix h = kron(m.h_s.matrix(), ComplexMatrix::Identity(dk, dk)) +
                    kron(ComplexMatrix::Identity(dn, dn), m.h_b.matrix()) +
                    m.lambda * kron(m.s_op.matrix(), m.b_op.matrix());
  ComplexMatrix u = (Complex(0, t) * h).exp();
  ComplexMatrix rho_b = gibbs_state(m.h_b, beta).matrix();
  ComplexMatrix s(dn * dn, dn * dn);
  for (int k = 0; k < dn; ++k) {
    for (int l = 0; l < dn; ++l) {
      ComplexMatrix chi = ComplexMatrix::Zero(dn, dn);
      chi(k, l) = 1;
      ComplexMatrix out = partial_trace_bath(ComplexMatrix(u * kron(chi, rho_b) * u.adjoint()), dn, dk);
      for (int a = 0; a < dn; ++a)
        for (int b = 0; b < dn; ++b) s(a * dn + b, k * dn + l) = out(a, b);
    }
  }
  return s;
}

TEST(Superoperator, RejectsNonTracePreserving) {
  EXPECT_THROW(Superoperator(2, ComplexMatrix(ComplexMatrix::Identity(4, 4) * 0.5)), InvariantError);
  EXPECT_THROW(Superoperator(2, ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST(Superoperator, FactoriesAct) {
  Stream s(1);
  DensityMatrix rho = random_state(3, s);
  EXPECT_NEAR((Superoperator::identity(3).apply(rho).matrix() - rho.matrix()).norm(), 0, 1e-15);
  ComplexMatrix u = matrix_exp_herm(HermitianOperator(random_hermitian(3, s)), Complex(0, 1));
  EXPECT_NEAR((Superoperator::unitary_conjugation(u).apply(rho.matrix()) - u * rho.matrix() * u.adjoint()).norm(),
              0, 1e-13);
  EXPECT_NEAR((Superoperator::depolarizing(3).apply(rho).matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 0,
              1e-15);
  RealMatrix p(2, 2);
  p << 0.9, 0.3, 0.1, 0.7;
  ComplexMatrix out = Superoperator::classical(p).apply(DensityMatrix::maximally_mixed(2).matrix());
  EXPECT_NEAR(out(0, 0).real(), 0.6, 1e-15);
  EXPECT_NEAR(out(1, 1).real(), 0.4, 1e-15);
  EXPECT_EQ(out(0, 1), Complex(0.0));
}

TEST(SuperopInBasis, MatchesConjugatedAction) {
  Stream s(2);
  JointModel m = random_model(1, 2, 0.3, 1.0, s);
  Superoperator sup = build_superoperator(m, 0.8, 1.0);
  HermitianSpectrum sp = eigh(m.h_s);
  ComplexMatrix se = superop_in_basis(sup.matrix(), sp.vectors);
  ComplexMatrix chi = testing::random_complex(2, 2, s);
  ComplexMatrix lhs = unvec(se * vec(ComplexMatrix(sp.vectors.adjoint() * chi * sp.vectors)), 2);
  ComplexMatrix rhs = sp.vectors.adjoint() * sup.apply(chi) * sp.vectors;
  EXPECT_NEAR((lhs - rhs).norm(), 0, 1e-13);
}

TEST(Choi, IdentityIsUnnormalizedBellProjector) {
  ComplexMatrix c = choi_matrix(Superoperator::identity(2).matrix(), 2);
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0;
  EXPECT_NEAR((c - phi * phi.adjoint()).norm(), 0, 1e-15);
}

TEST(JointHamiltonian, DecoupledAndHandAssembled) {
  Stream s(3);
  JointModel m = random_model(1, 2, 0.0, 1.0, s);
  RealVector e = eigh(build_joint_hamiltonian(m)).values;
  RealVector es = eigh(m.h_s).values, eb = eigh(m.h_b).values;
  std::vector<double> sums;
  for (int i = 0; i < es.size(); ++i)
    for (int j = 0; j < eb.size(); ++j) sums.push_back(es(i) + eb(j));
  std::sort(sums.begin(), sums.end());
  for (size_t i = 0; i < sums.size(); ++i) EXPECT_NEAR(e(static_cast<int>(i)), sums[i], 1e-13);

  const double l = 0.3;
  HermitianOperator z(pauli_z());
  JointModel zz{1, 1, z, z, z, z, l};
  ComplexMatrix h = build_joint_hamiltonian(zz).matrix();
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect.diagonal() << 1 + 1 + l, 1 - 1 - l, -1 + 1 - l, -1 - 1 + l;
  EXPECT_NEAR((h - expect).norm(), 0, 1e-15);

  JointModel r = random_model(2, 2, 0.2, 1.0, s);
  EXPECT_LT(hermiticity_defect(build_joint_hamiltonian(r).matrix()), 1e-12);
  EXPECT_THROW(build_joint_hamiltonian(r, 3), DimensionError);
}

TEST(BuildSuperoperator, MatchesBruteForceProbe) {
  Stream s(4);
  for (int trial = 0; trial < 4; ++trial) {
    JointModel m = random_model(1 + trial % 2, 1 + trial % 3, 0.15, 0.7, s);
    for (double t : {0.3, 1.7}) {
      EXPECT_NEAR((build_superoperator(m, t, 0.7).matrix() - brute_force_channel(m, t, 0.7)).norm(), 0, 1e-11);
    }
  }
}

TEST(BuildSuperoperator, TimeZeroAndDecoupled) {
  Stream s(5);
  JointModel m = random_model(2, 2, 0.2, 1.0, s);
  EXPECT_NEAR((build_superoperator(m, 0.0, 1.0).matrix() - ComplexMatrix::Identity(16, 16)).norm(), 0, 1e-12);
  m.lambda = 0;
  const double t = 0.9;
  Superoperator s0 = build_superoperator(m, t, 1.0);
  ComplexMatrix u = matrix_exp_herm(m.h_s, Complex(0, t));
  EXPECT_NEAR((s0.matrix() - kron(u, u.conjugate())).norm(), 0, 1e-12);
  RealVector e = eigh(m.h_s).values;
  ComplexVector mu = eig_general(s0.matrix()).values;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Complex target = std::exp(Complex(0, t * (e(a) - e(b))));
      double best = INFINITY;
      for (int i = 0; i < mu.size(); ++i) best = std::min(best, std::abs(mu(i) - target));
      EXPECT_LT(best, 1e-9);
    }
  }
}

TEST(BuildSuperoperator, ChoiIsPositive) {
  Stream s(6);
  JointModel m = random_model(1, 2, 0.2, 1.0, s);
  ComplexMatrix c = choi_matrix(build_superoperator(m, 1.3, 1.0).matrix(), 2);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<ComplexMatrix>((c + c.adjoint()) / 2.0).eigenvalues().minCoeff(), -1e-9);
}

TEST(VerifyTcp, IdentityAndUnitary) {
  TcpDiagnostics d = verify_tcp(Superoperator::identity(3));
  EXPECT_LT(d.worst(), 1e-14);
  Stream s(7);
  ComplexMatrix u = matrix_exp_herm(HermitianOperator(random_hermitian(3, s)), Complex(0, 1.1));
  Superoperator su = Superoperator::unitary_conjugation(u);
  EXPECT_LT(verify_tcp(su).worst(), 1e-12);
  for (int m = 0; m < 3; ++m) {
    double row = 0, col = 0;
    for (int n = 0; n < 3; ++n) {
      EXPECT_NEAR(std::abs(su.matrix()(m * 3 + m, n * 3 + n) - std::norm(u(m, n))), 0, 1e-14);
      row += su.matrix()(m * 3 + m, n * 3 + n).real();
      col += su.matrix()(n * 3 + n, m * 3 + m).real();
    }
    EXPECT_NEAR(row, 1.0, 1e-13);
    EXPECT_NEAR(col, 1.0, 1e-13);
  }
}

TEST(VerifyTcp, RandomChannelsSatisfyAllProperties) {
  Stream s(8);
  for (int trial = 0; trial < 10; ++trial) {
    JointModel m = random_model(1 + trial % 2, 1 + trial % 3, s.uniform(0, 0.2), 1.0, s);
    TcpDiagnostics d = verify_tcp(build_superoperator(m, s.uniform(0, 2), 1.0), trial);
    EXPECT_LT(d.column_sum_error, 1e-9);
    EXPECT_LT(d.cross_sum_error, 1e-9);
    EXPECT_LT(d.hermiticity_error, 1e-9);
    EXPECT_LE(d.spectral_radius, 1 + 1e-9);
    EXPECT_LT(d.conjugate_pairing_error, 1e-9);
    EXPECT_GT(d.choi_min_eigenvalue, -1e-9);
    EXPECT_GT(d.positivity_min_eigenvalue, -1e-9);
  }
}

TEST(ChannelSpectrum, IdentityIsAmbiguous) {
  EXPECT_THROW(channel_spectrum(Superoperator::identity(2)), AmbiguousFixedPointError);
}

TEST(ChannelSpectrum, DepolarizingAndRandom) {
  ChannelSpectrum d = channel_spectrum(Superoperator::depolarizing(3));
  EXPECT_NEAR((d.fixed_point.matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 0, 1e-12);
  EXPECT_NEAR(std::abs(d.kappa), 0.0, 1e-12);
  Stream s(9);
  JointModel m = random_model(1, 3, 0.3, 1.0, s);
  Superoperator sup = build_superoperator(m, 1.0, 1.0);
  ChannelSpectrum r = channel_spectrum(sup);
  EXPECT_LT(trace_norm(sup.apply(r.fixed_point.matrix()) - r.fixed_point.matrix()), 1e-8);
  EXPECT_LT(r.fixed_point_residual, 1e-8);
  EXPECT_LT(std::abs(r.kappa), 1.0);
}

TEST(Iteration, StationaryAndDepolarizing) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d.diagonal() << 0.3, -0.8;
  HermitianOperator hs(d);
  Stream s(10);
  HermitianOperator hb = assemble(sample_bath(2, 1.0, s));
  Interaction in = sample_interaction(1, 2, gibbs_state(hb, 1.0), s);
  JointModel m{1, 2, hs, hb, in.s_op, in.b_op, 0.0};
  IterationTrace tr = iterate_algorithm_one(m, 0.7, 1.0, 20, 1e-10);
  EXPECT_TRUE(tr.converged);
  EXPECT_EQ(tr.converged_round, 1);
  for (const DensityMatrix& st : tr.states) {
    EXPECT_NEAR((st.matrix() - DensityMatrix::basis_state(2, 0).matrix()).norm(), 0, 1e-12);
  }
  IterationTrace dp = iterate_channel(Superoperator::depolarizing(4), DensityMatrix::basis_state(4, 2), 20, 1e-12);
  EXPECT_TRUE(dp.converged);
  EXPECT_EQ(dp.converged_round, 1);
  EXPECT_NEAR((dp.states.back().matrix() - ComplexMatrix::Identity(4, 4) / 4.0).norm(), 0, 1e-14);
}

TEST(Iteration, ConvergesToChannelFixedPoint) {
  Stream s(11);
  const double beta = 3.0, eps = 1e-8;
  JointModel m = random_model(1, 3, 0.1, beta, s);
  const double t = 4.0;
  IterationTrace tr = iterate_algorithm_one(m, t, beta, 200000, eps, HermitianOperator(pauli_x()));
  ASSERT_TRUE(tr.converged);
  EXPECT_NO_THROW(require_converged(tr));
  DensityMatrix fp = channel_fixed_point(build_superoperator(m, t, beta));
  EXPECT_LT(trace_norm(tr.states.back().matrix() - fp.matrix()), 10 * eps * (1 / (1 - 0.999)));
  EXPECT_EQ(tr.observable_series.size(), tr.states.size());
}

TEST(Iteration, RequireConvergedThrows) {
  Stream s(12);
  JointModel m = random_model(1, 2, 0.05, 1.0, s);
  IterationTrace tr = iterate_algorithm_one(m, 0.5, 1.0, 3, 1e-14);
  EXPECT_FALSE(tr.converged);
  EXPECT_THROW(require_converged(tr), ConvergenceError);
}

TEST(ConvergenceBound, DepolarizingClassicalAndRandom) {
  ConvergenceBound d = convergence_bound_check(Superoperator::depolarizing(2), DensityMatrix::basis_state(2, 0), 4);
  EXPECT_NEAR(d.distances[1], 0.0, 1e-14);

  RealMatrix p(2, 2);
  p << 0.9, 0.3, 0.1, 0.7;  // second eigenvalue 0.6
  ConvergenceBound c = convergence_bound_check(Superoperator::classical(p), DensityMatrix::basis_state(2, 0), 30);
  EXPECT_NEAR(c.kappa_abs, 0.6, 1e-12);
  EXPECT_NEAR(c.distances[10] / c.distances[9], 0.6, 0.03);
  EXPECT_TRUE(c.bound_holds);

  Stream s(13);
  JointModel m = random_model(1, 2, 0.2, 1.0, s);
  Superoperator sup = build_superoperator(m, 2.0, 1.0);
  ConvergenceBound r = convergence_bound_check(sup, DensityMatrix::basis_state(2, 0), 60, 20);
  ASSERT_LT(r.kappa_abs, 1.0);
  EXPECT_NEAR(r.slope, r.log_kappa, 0.1 * std::abs(r.log_kappa));
  EXPECT_TRUE(r.bound_holds);
}

TEST(Dephase, LimitsAndGeometricSum) {
  Stream s(14);
  HermitianOperator h(random_hermitian(3, s));
  DensityMatrix rho = random_state(3, s);
  EXPECT_NEAR((dephase(rho, h, 1).matrix() - rho.matrix()).norm(), 0, 1e-14);
  HermitianSpectrum sp = eigh(h);
  RealVector p(3);
  p << 0.2, 0.5, 0.3;
  DensityMatrix diag = DensityMatrix::from_populations(p, sp.vectors);
  EXPECT_NEAR((dephase(diag, h, 17).matrix() - diag.matrix()).norm(), 0, 1e-13);

  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(1, 1) = 1.0;  // gap 1
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  DensityMatrix pr(ComplexMatrix(plus * plus.adjoint()));
  const int a = 1000;
  ComplexMatrix out = dephase(pr, HermitianOperator(g), a).matrix();
  Complex sum = 0;
  for (int k = 0; k < a; ++k) sum += std::polar(1.0, static_cast<double>(k));
  EXPECT_NEAR(std::abs(out(0, 1)), 0.5 * std::abs(sum) / a, 1e-12);
  EXPECT_LT(std::abs(out(0, 1)), 0.01);
}

}  // namespace
}  // namespace qequil
