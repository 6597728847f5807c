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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qequil/errors.h"
#include "qequil/rng.h"

namespace qequil {

namespace {

constexpr double kTpTol = 1e-10;

double column_sum_error(const ComplexMatrix& m, int n) {
  double err = 0.0;
  for (int k = 0; k < n; ++k) {
    Complex sum = 0.0;
    for (int i = 0; i < n; ++i) sum += m(i * n + i, k * n + k);
    err = std::max(err, std::abs(sum - 1.0));
  }
  return err;
}

double cross_sum_error(const ComplexMatrix& m, int n) {
  double err = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      Complex sum = 0.0;
      for (int i = 0; i < n; ++i) sum += m(i * n + i, k * n + l);
      err = std::max(err, std::abs(sum));
    }
  }
  return err;
}

// S_{mn,kl} against conj(S_{nm,lk}).
double hermiticity_preservation_error(const ComplexMatrix& m, int n) {
  double err = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          err = std::max(err, std::abs(m(a * n + b, k * n + l) - std::conj(m(b * n + a, l * n + k))));
        }
      }
    }
  }
  return err;
}

DensityMatrix hermitized_state(ComplexMatrix m) {
  m = (m + m.adjoint()).eval() * 0.5;
  Complex tr = m.trace();
  m /= tr.real();
  return DensityMatrix(std::move(m));
}

}  // namespace

Superoperator::Superoperator(int dim_n, ComplexMatrix matrix) : n_(dim_n), m_(std::move(matrix)) {
  const Eigen::Index nn = static_cast<Eigen::Index>(n_) * n_;
  if (n_ < 1 || m_.rows() != nn || m_.cols() != nn) {
    throw DimensionError("Superoperator: matrix must be N^2 x N^2");
  }
  if (!all_finite(m_)) throw InvariantError("Superoperator: non-finite entry");
  double cs = std::max(column_sum_error(m_, n_), cross_sum_error(m_, n_));
  if (cs > kTpTol) {
    throw InvariantError("Superoperator: not trace preserving (error " + std::to_string(cs) + ")");
  }
  double he = hermiticity_preservation_error(m_, n_);
  if (he > kTpTol) {
    throw InvariantError("Superoperator: not Hermiticity preserving (error " + std::to_string(he) +
                         ")");
  }
}

Superoperator Superoperator::identity(int dim_n) {
  return Superoperator(dim_n, ComplexMatrix::Identity(dim_n * dim_n, dim_n * dim_n));
}

Superoperator Superoperator::unitary_conjugation(const ComplexMatrix& u) {
  return Superoperator(static_cast<int>(u.rows()), kron(u, u.conjugate()));
}

Superoperator Superoperator::depolarizing(int dim_n) {
  ComplexMatrix m = ComplexMatrix::Zero(dim_n * dim_n, dim_n * dim_n);
  for (int i = 0; i < dim_n; ++i) {
    for (int k = 0; k < dim_n; ++k) m(i * dim_n + i, k * dim_n + k) = 1.0 / dim_n;
  }
  return Superoperator(dim_n, std::move(m));
}

Superoperator Superoperator::classical(const RealMatrix& p) {
  const int n = static_cast<int>(p.rows());
  if (p.cols() != n) throw DimensionError("Superoperator::classical: chain must be square");
  ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) m(i * n + i, k * n + k) = p(i, k);
  }
  return Superoperator(n, std::move(m));
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& chi) const {
  if (chi.rows() != n_ || chi.cols() != n_) throw DimensionError("Superoperator::apply: bad shape");
  return unvec(m_ * vec(chi), n_);
}

DensityMatrix Superoperator::apply(const DensityMatrix& rho) const {
  return hermitized_state(apply(rho.matrix()));
}

ComplexMatrix OperatorMap::apply(const ComplexMatrix& chi) const {
  if (chi.rows() != dim_n || chi.cols() != dim_n) throw DimensionError("OperatorMap::apply: bad shape");
  return unvec(matrix * vec(chi), dim_n);
}

ComplexMatrix superop_in_basis(const ComplexMatrix& superop, const ComplexMatrix& v) {
  return kron(v.adjoint(), v.transpose()) * superop * kron(v, v.conjugate());
}

ComplexMatrix choi_matrix(const ComplexMatrix& superop, int n) {
  ComplexMatrix c(n * n, n * n);
  for (int m = 0; m < n; ++m) {
    for (int nn = 0; nn < n; ++nn) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) c(k * n + m, l * n + nn) = superop(m * n + nn, k * n + l);
      }
    }
  }
  return c;
}

HermitianOperator build_joint_hamiltonian(const JointModel& model, int max_qubits) {
  if (model.n < 1 || model.k < 1) throw DimensionError("joint Hamiltonian: n and k must be >= 1");
  if (model.n + model.k > max_qubits) {
    throw DimensionError("joint Hamiltonian: n + k = " + std::to_string(model.n + model.k) +
                         " exceeds the cap of " + std::to_string(max_qubits) + " qubits");
  }
  const int dn = 1 << model.n;
  const int dk = 1 << model.k;
  if (model.h_s.dim() != dn || model.s_op.dim() != dn || model.h_b.dim() != dk ||
      model.b_op.dim() != dk) {
    throw DimensionError("joint Hamiltonian: operator dimensions do not match 2^n and 2^k");
  }
  ComplexMatrix h = kron(model.h_s.matrix(), ComplexMatrix::Identity(dk, dk)) +
                    kron(ComplexMatrix::Identity(dn, dn), model.h_b.matrix()) +
                    model.lambda * kron(model.s_op.matrix(), model.b_op.matrix());
  h = (h + h.adjoint()).eval() * 0.5;
  return HermitianOperator(std::move(h));
}

ChannelBuilder::ChannelBuilder(const JointModel& model, double beta, int max_qubits)
    : n_(1 << model.n),
      k_dim_(1 << model.k),
      joint_(eigh(build_joint_hamiltonian(model, max_qubits))),
      rho_b_(gibbs_state(model.h_b, beta)) {
  HermitianSpectrum bath = eigh(model.h_b);
  bath_weights_ = gibbs_weights(bath.values, beta);
  x_ = joint_.vectors.adjoint() * kron(ComplexMatrix::Identity(n_, n_), bath.vectors);
}

Superoperator ChannelBuilder::at(double t) const {
  if (!(t >= 0)) throw InvariantError("build_superoperator: t must be >= 0");
  const int n = n_;
  const int kd = k_dim_;
  ComplexVector phases = (Complex(0.0, t) * joint_.values.cast<Complex>()).array().exp();
  ComplexMatrix m = joint_.vectors * phases.asDiagonal() * x_;
  // r[(mm,k),(a,j)] = sqrt(p_j) M[(mm,a),(k,j)]; r r^dagger is the Choi matrix.
  ComplexMatrix r(n * n, kd * kd);
  for (int mm = 0; mm < n; ++mm) {
    for (int k = 0; k < n; ++k) {
      for (int a = 0; a < kd; ++a) {
        for (int j = 0; j < kd; ++j) {
          r(mm * n + k, a * kd + j) = std::sqrt(bath_weights_(j)) * m(mm * kd + a, k * kd + j);
        }
      }
    }
  }
  ComplexMatrix choi = r * r.adjoint();
  ComplexMatrix s(n * n, n * n);
  for (int mm = 0; mm < n; ++mm) {
    for (int nn = 0; nn < n; ++nn) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s(mm * n + nn, k * n + l) = choi(mm * n + k, nn * n + l);
      }
    }
  }
  return Superoperator(n, std::move(s));
}

Superoperator build_superoperator(const JointModel& model, double t, double beta) {
  return ChannelBuilder(model, beta).at(t);
}

double TcpDiagnostics::worst() const {
  return std::max({column_sum_error, cross_sum_error, hermiticity_error, spectral_radius_excess,
                   conjugate_pairing_error, std::max(0.0, -choi_min_eigenvalue),
                   std::max(0.0, -positivity_min_eigenvalue)});
}

TcpDiagnostics verify_tcp(const Superoperator& s, std::uint64_t probe_seed, int probes) {
  const int n = s.dim_n();
  const ComplexMatrix& m = s.matrix();
  TcpDiagnostics d;
  d.column_sum_error = column_sum_error(m, n);
  d.cross_sum_error = cross_sum_error(m, n);
  d.hermiticity_error = hermiticity_preservation_error(m, n);

  ComplexMatrix choi = choi_matrix(m, n);
  choi = (choi + choi.adjoint()).eval() * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ces(choi, Eigen::EigenvaluesOnly);
  d.choi_min_eigenvalue = ces.eigenvalues().minCoeff();

  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  const ComplexVector& mu = es.eigenvalues();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    d.spectral_radius = std::max(d.spectral_radius, std::abs(mu(i)));
    double best = INFINITY;
    for (Eigen::Index j = 0; j < mu.size(); ++j) best = std::min(best, std::abs(std::conj(mu(i)) - mu(j)));
    d.conjugate_pairing_error = std::max(d.conjugate_pairing_error, best);
  }
  d.spectral_radius_excess = std::max(0.0, d.spectral_radius - 1.0);

  Stream stream(probe_seed, {0x7C9});
  d.positivity_min_eigenvalue = INFINITY;
  for (int p = 0; p < probes; ++p) {
    ComplexMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = Complex(stream.normal(), stream.normal());
    }
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    ComplexMatrix out = s.apply(rho);
    out = (out + out.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> pes(out, Eigen::EigenvaluesOnly);
    d.positivity_min_eigenvalue = std::min(d.positivity_min_eigenvalue, pes.eigenvalues().minCoeff());
  }
  if (probes <= 0) d.positivity_min_eigenvalue = 0.0;
  return d;
}

DensityMatrix channel_fixed_point(const Superoperator& s) {
  const int n = s.dim_n();
  const int nn = n * n;
  ComplexMatrix a = s.matrix() - ComplexMatrix::Identity(nn, nn);
  // Row (0,0) is minus the sum of the other diagonal rows by trace preservation.
  a.row(0).setZero();
  for (int i = 0; i < n; ++i) a(0, i * n + i) = 1.0;
  ComplexVector rhs = ComplexVector::Zero(nn);
  rhs(0) = 1.0;
  ComplexVector v = a.fullPivLu().solve(rhs);
  if (!v.allFinite()) throw NumericalError("channel_fixed_point: singular system");
  return hermitized_state(unvec(v, n));
}

ChannelSpectrum channel_spectrum(const Superoperator& s) {
  SpectralDecomposition dec = eig_general(s.matrix());
  const ComplexVector& mu = dec.values;
  Eigen::Index unit = 0;
  int near_one = 0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i) - 1.0) < std::abs(mu(unit) - 1.0)) unit = i;
    if (std::abs(mu(i) - 1.0) < kUnitEigenvalueTol) ++near_one;
  }
  if (near_one >= 2) {
    throw AmbiguousFixedPointError("channel_spectrum: " + std::to_string(near_one) +
                                   " eigenvalues within 1e-9 of 1");
  }
  Complex kappa = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (i != unit && std::abs(mu(i)) > std::abs(kappa)) kappa = mu(i);
  }
  DensityMatrix rho0 = channel_fixed_point(s);
  double residual = trace_norm(s.apply(rho0.matrix()) - rho0.matrix());
  if (!(residual < 1e-8)) {
    throw NumericalError("channel_spectrum: fixed point residual " + std::to_string(residual));
  }
  bool defective = dec.near_defective;
  return ChannelSpectrum{std::move(dec), std::move(rho0), kappa, defective, residual};
}

void require_converged(const IterationTrace& trace) {
  if (!trace.converged) {
    throw ConvergenceError("iteration did not converge; final delta " +
                               std::to_string(trace.final_delta),
                           trace.final_delta);
  }
}

IterationTrace iterate_channel(const Superoperator& s, const DensityMatrix& start, int r_max,
                               double epsilon, const std::optional<HermitianOperator>& observable,
                               int window) {
  if (r_max < 1) throw InvariantError("iterate: r_max must be >= 1");
  if (window < 1) throw InvariantError("iterate: window must be >= 1");
  if (start.dim() != s.dim_n()) throw DimensionError("iterate: state and channel differ in dimension");
  IterationTrace trace;
  auto record = [&](const DensityMatrix& rho) {
    if (observable) {
      trace.observable_series.push_back((observable->matrix() * rho.matrix()).trace().real());
    }
    trace.states.push_back(rho);
  };
  record(start);
  int run = 0;
  for (int r = 0; r < r_max; ++r) {
    DensityMatrix next = s.apply(trace.states.back());
    double delta = trace_norm(next.matrix() - trace.states.back().matrix());
    trace.deltas.push_back(delta);
    record(next);
    run = delta <= epsilon ? run + 1 : 0;
    if (run >= window) {
      trace.converged = true;
      trace.converged_round = std::max(1, r + 1 - window);
      break;
    }
  }
  trace.final_delta = trace.deltas.back();
  return trace;
}

IterationTrace iterate_algorithm_one(const JointModel& model, double t, double beta, int r_max,
                                     double epsilon,
                                     const std::optional<HermitianOperator>& observable,
                                     int window) {
  Superoperator s = build_superoperator(model, t, beta);
  return iterate_channel(s, DensityMatrix::basis_state(s.dim_n(), 0), r_max, epsilon, observable,
                         window);
}

ConvergenceBound convergence_bound_check(const Superoperator& s, const DensityMatrix& rho,
                                         int r_max, int fit_from) {
  if (r_max < 2) throw InvariantError("convergence_bound_check: r_max must be >= 2");
  ChannelSpectrum spec = channel_spectrum(s);
  ConvergenceBound out;
  out.kappa_abs = std::abs(spec.kappa);
  out.log_kappa = std::log(out.kappa_abs);
  ComplexMatrix cur = rho.matrix();
  for (int r = 0; r <= r_max; ++r) {
    out.distances.push_back(trace_norm(cur - spec.fixed_point.matrix()));
    cur = s.apply(cur);
  }
  constexpr double kFloor = 1e-12;
  const int half = r_max / 2;
  for (int r = 1; r <= half; ++r) {
    double env = r * std::pow(out.kappa_abs, r);
    if (out.distances[r] > kFloor) {
      out.fitted_constant = env > 0 ? std::max(out.fitted_constant, out.distances[r] / env) : INFINITY;
    }
  }
  for (int r = half + 1; r <= r_max; ++r) {
    double bound = out.fitted_constant * r * std::pow(out.kappa_abs, r);
    if (out.distances[r] > bound * (1 + 1e-9) + kFloor) out.bound_holds = false;
  }
  int lo = fit_from >= 0 ? fit_from : half;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int r = lo; r <= r_max; ++r) {
    if (out.distances[r] <= kFloor) continue;
    double y = std::log(out.distances[r]);
    sx += r;
    sy += y;
    sxx += static_cast<double>(r) * r;
    sxy += r * y;
    ++cnt;
  }
  out.slope = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)
                       : -std::numeric_limits<double>::infinity();
  for (int r = r_max; r >= 1; --r) {
    if (out.distances[r] > kFloor && out.distances[r - 1] > kFloor) {
      out.last_ratio = out.distances[r] / out.distances[r - 1];
      break;
    }
  }
  return out;
}

DensityMatrix dephase(const DensityMatrix& rho, const HermitianOperator& h_s, int a) {
  if (a < 1) throw InvariantError("dephase: a must be >= 1");
  if (rho.dim() != h_s.dim()) throw DimensionError("dephase: dimension mismatch");
  HermitianSpectrum spec = eigh(h_s);
  const int n = rho.dim();
  ComplexMatrix r = spec.vectors.adjoint() * rho.matrix() * spec.vectors;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double w = spec.values(i) - spec.values(j);
      Complex avg = 0.0;
      for (int s = 0; s < a; ++s) avg += std::polar(1.0, w * s);
      r(i, j) *= avg / static_cast<double>(a);
    }
  }
  return hermitized_state(spec.vectors * r * spec.vectors.adjoint());
}

}  // namespace qequil
