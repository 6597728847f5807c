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

#include "qequil/perturbation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "qequil/errors.h"

namespace qequil {

namespace {

constexpr double kMinLevelSpacing = 1e-8;

void require_nondegenerate(const RealVector& energies) {
  for (Eigen::Index i = 1; i < energies.size(); ++i) {
    if (!(energies(i) - energies(i - 1) > kMinLevelSpacing)) {
      throw DegenerateSpectrumError("energies must be ascending with spacing > 1e-8");
    }
  }
}

// Stationary vector of a column-stochastic matrix with the normalization row imposed.
RealVector solve_stationary(const RealMatrix& p) {
  const Eigen::Index n = p.rows();
  RealMatrix a = p - RealMatrix::Identity(n, n);
  a.row(0).setOnes();
  RealVector rhs = RealVector::Zero(n);
  rhs(0) = 1.0;
  return a.fullPivLu().solve(rhs);
}

// Cesaro limit of P^r start: keep only the components along eigenvalues within
// kUnitEigenvalueTol of 1. Falls back to renormalized squaring when P is defective.
RealVector limit_populations(const RealMatrix& p, const Eigen::EigenSolver<RealMatrix>& es,
                             bool defective, const RealVector& start) {
  RealVector out;
  if (!defective) {
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::VectorXcd c = v.fullPivLu().solve(start.cast<Complex>());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (std::abs(es.eigenvalues()(i) - 1.0) >= kUnitEigenvalueTol) c(i) = 0.0;
    }
    out = (v * c).real();
  } else {
    RealMatrix q = p;
    for (int i = 0; i < 64; ++i) {
      RealMatrix next = q * q;
      next.array().rowwise() /= next.colwise().sum().array();
      if ((next - q).cwiseAbs().maxCoeff() < 1e-14) break;
      q = next;
    }
    out = q * start;
  }
  if (!out.allFinite()) throw NumericalError("sector_analysis: non-finite limiting populations");
  return out / out.sum();
}

SectorAnalysis analyze(const RealMatrix& p, const ComplexMatrix& mu, const ComplexMatrix& d_block,
                       double c_bar, const RealVector& start_populations) {
  const Eigen::Index n = p.rows();
  SectorAnalysis out;
  out.d_block = d_block;
  out.p_matrix = p;
  out.nd_eigenvalues = mu;

  Eigen::EigenSolver<RealMatrix> es(p);
  if (es.info() != Eigen::Success) throw ConvergenceError("sector_analysis: D-block eigensolver failed", INFINITY);
  std::vector<double> moduli;
  int near_one = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    moduli.push_back(std::abs(es.eigenvalues()(i)));
    if (std::abs(es.eigenvalues()(i) - 1.0) < kUnitEigenvalueTol) ++near_one;
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  out.kappa_d = n > 1 ? moduli[1] : 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(es.eigenvectors());
  double smin = svd.singularValues()(n - 1);
  out.d_block_defective = !(smin > 0 && svd.singularValues()(0) / smin <= kDefectiveCondition);

  out.kappa_nd = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a != b) out.kappa_nd = std::max(out.kappa_nd, std::abs(mu(a, b)));
    }
  }

  RealVector pi;
  if (near_one <= 1) {
    pi = solve_stationary(p);
  } else {
    out.fixed_point_unique = false;
    RealVector start = start_populations.size() == n ? start_populations
                                                     : RealVector::Constant(n, 1.0 / n);
    pi = limit_populations(p, es, out.d_block_defective, start);
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  out.fixed_populations = pi;
  out.perturbative_fixed_point =
      DensityMatrix::from_populations(pi, ComplexMatrix::Identity(n, n));

  if (c_bar > 0) {
    out.rate_d = (1.0 - out.kappa_d) / c_bar;
    out.rate_nd = (1.0 - out.kappa_nd) / c_bar;
  }
  if (!std::isfinite(out.rate_d) || !std::isfinite(out.rate_nd)) {
    throw NumericalError("sector_analysis: non-finite rate");
  }
  return out;
}

const std::vector<std::pair<double, double>>& gauss_legendre() {
  static const std::vector<std::pair<double, double>> rule = [] {
    constexpr int kPoints = 24;
    RealMatrix jac = RealMatrix::Zero(kPoints, kPoints);
    for (int i = 1; i < kPoints; ++i) {
      double b = i / std::sqrt(4.0 * i * i - 1.0);
      jac(i, i - 1) = b;
      jac(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jac);
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < kPoints; ++i) {
      double v = es.eigenvectors()(0, i);
      out.emplace_back(es.eigenvalues()(i), 2.0 * v * v);
    }
    return out;
  }();
  return rule;
}

template <typename F>
double integrate(const F& f, double lo, double hi) {
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo), sum = 0.0;
  for (const auto& [x, w] : gauss_legendre()) sum += w * f(mid + half * x);
  return sum * half;
}

}  // namespace

OperatorMap extract_s2bar(const Superoperator& s, const HermitianOperator& h_s, double t,
                          double lambda) {
  if (!(lambda > 0)) throw InvariantError("extract_s2bar: lambda must be > 0");
  if (h_s.dim() != s.dim_n()) throw DimensionError("extract_s2bar: dimension mismatch");
  HermitianSpectrum spec = eigh(h_s);
  const int n = s.dim_n();
  ComplexMatrix se = superop_in_basis(s.matrix(), spec.vectors);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      se(a * n + b, a * n + b) -= std::polar(1.0, t * (spec.values(a) - spec.values(b)));
    }
  }
  return OperatorMap{n, se / (lambda * lambda)};
}

SectorAnalysis sector_analysis(const OperatorMap& s2bar, const RealVector& energies,
                               double lambda, double t, double c_bar,
                               const RealVector& start_populations) {
  require_nondegenerate(energies);
  const int n = s2bar.dim_n;
  if (energies.size() != n) throw DimensionError("sector_analysis: energies and map differ in size");
  const double l2 = lambda * lambda;
  ComplexMatrix d(n, n);
  RealMatrix p(n, n);
  ComplexMatrix mu = ComplexMatrix::Ones(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      d(a, b) = s2bar.matrix(a * n + a, b * n + b);
      p(a, b) = (a == b ? 1.0 : 0.0) + l2 * d(a, b).real();
      if (a != b) {
        mu(a, b) = std::polar(1.0, t * (energies(a) - energies(b))) +
                   l2 * s2bar.matrix(a * n + b, a * n + b);
      }
    }
  }
  return analyze(p, mu, d, c_bar, start_populations);
}

SectorAnalysis sector_analysis_exact(const ComplexMatrix& s_eig, const RealVector& energies,
                                     double c_bar, const RealVector& start_populations) {
  require_nondegenerate(energies);
  const int n = static_cast<int>(energies.size());
  if (s_eig.rows() != n * n) throw DimensionError("sector_analysis_exact: size mismatch");
  ComplexMatrix d(n, n);
  RealMatrix p(n, n);
  ComplexMatrix mu = ComplexMatrix::Ones(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      p(a, b) = s_eig(a * n + a, b * n + b).real();
      d(a, b) = p(a, b) - (a == b ? 1.0 : 0.0);
      if (a != b) mu(a, b) = s_eig(a * n + b, a * n + b);
    }
  }
  return analyze(p, mu, d, c_bar, start_populations);
}

Complex BathCorrelation::h(double t) const {
  Complex sum = 0.0;
  for (const CorrelationPeak& p : peaks) sum += p.weight * std::polar(1.0, p.omega * t);
  return sum;
}

double BathCorrelation::total_weight() const {
  double sum = 0.0;
  for (const CorrelationPeak& p : peaks) sum += p.weight;
  return sum;
}

double BathCorrelation::kms_error(double beta) const {
  std::vector<CorrelationPeak> sorted = peaks;
  std::sort(sorted.begin(), sorted.end(),
            [](const CorrelationPeak& a, const CorrelationPeak& b) { return a.omega < b.omega; });
  std::vector<CorrelationPeak> merged;
  for (const CorrelationPeak& p : sorted) {
    if (!merged.empty() && p.omega - merged.back().omega < 1e-9) {
      merged.back().weight += p.weight;
    } else {
      merged.push_back(p);
    }
  }
  auto weight_at = [&](double w) {
    auto it = std::lower_bound(merged.begin(), merged.end(), w - 1e-9,
                               [](const CorrelationPeak& a, double x) { return a.omega < x; });
    double s = 0.0;
    for (; it != merged.end() && it->omega <= w + 1e-9; ++it) s += it->weight;
    return s;
  };
  double err = 0.0;
  for (const CorrelationPeak& p : merged) {
    err = std::max(err, std::abs(weight_at(-p.omega) - std::exp(-beta * p.omega) * p.weight));
  }
  return err;
}

BathCorrelation bath_correlation(const HermitianOperator& h_b, const HermitianOperator& b_op,
                                 double beta) {
  if (h_b.dim() != b_op.dim()) throw DimensionError("bath_correlation: dimension mismatch");
  HermitianSpectrum spec = eigh(h_b);
  RealVector p = gibbs_weights(spec.values, beta);
  ComplexMatrix b = spec.vectors.adjoint() * b_op.matrix() * spec.vectors;
  BathCorrelation out;
  const int kd = h_b.dim();
  out.peaks.reserve(static_cast<size_t>(kd) * kd);
  for (int k = 0; k < kd; ++k) {
    for (int l = 0; l < kd; ++l) {
      out.peaks.push_back({spec.values(l) - spec.values(k), p(k) * std::norm(b(k, l))});
    }
  }
  return out;
}

BathCorrelation bath_correlation(const LocalHamiltonian& h_b, const HermitianOperator& b_op,
                                 double beta) {
  return bath_correlation(assemble(h_b), b_op, beta);
}

double cos_kernel(double x, double t) {
  double y = t * x;
  if (std::abs(y) < 1e-4) return t * t * (0.5 - y * y / 24.0);
  double s = std::sin(0.5 * y);
  return 2.0 * s * s / (x * x);
}

double sin_kernel(double x, double t) {
  double y = t * x;
  if (std::abs(y) < 0.1) {
    double y2 = y * y;
    // (y - sin y) / y^3 as a Taylor series, times t^3 x.
    double series = 1.0 / 6 - y2 / 120 + y2 * y2 / 5040 - y2 * y2 * y2 / 362880 +
                    y2 * y2 * y2 * y2 / 39916800;
    return t * t * t * x * series;
  }
  return (y - std::sin(y)) / (x * x);
}

SecondOrder second_order_Q_nu(const RealVector& energies, const ComplexMatrix& s_eig,
                              const BathCorrelation& corr, double t) {
  if (!(t > 0)) throw InvariantError("second_order_Q_nu: t must be > 0");
  const int n = static_cast<int>(energies.size());
  if (s_eig.rows() != n || s_eig.cols() != n) throw DimensionError("second_order_Q_nu: size mismatch");
  RealMatrix s2 = s_eig.cwiseAbs2();
  SecondOrder out;
  out.q = RealMatrix::Zero(n, n);
  out.nu = ComplexMatrix::Ones(n, n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      if (m == k) continue;
      double acc = 0.0;
      for (const CorrelationPeak& p : corr.peaks) {
        acc += p.weight * cos_kernel(p.omega + energies(m) - energies(k), t);
      }
      out.q(m, k) = 2.0 * s2(m, k) * acc;
    }
  }
  for (int k = 0; k < n; ++k) out.q(k, k) = -(out.q.col(k).sum() - out.q(k, k));

  // f_n(w_p) summed against the peak weights, plus the S_nn S_mm K(w) term.
  ComplexVector f = ComplexVector::Zero(n);
  double k0 = 0.0;
  for (const CorrelationPeak& p : corr.peaks) {
    k0 += p.weight * cos_kernel(p.omega, t);
    for (int a = 0; a < n; ++a) {
      Complex fa = 0.0;
      for (int l = 0; l < n; ++l) {
        double x = p.omega - energies(a) + energies(l);
        fa += s2(l, a) * Complex(cos_kernel(x, t), sin_kernel(x, t));
      }
      f(a) += p.weight * fa;
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      out.nu(a, b) = 2.0 * s_eig(a, a).real() * s_eig(b, b).real() * k0 - f(a) - std::conj(f(b));
    }
  }
  return out;
}

SpectralDensity gaussian_kms_density(double beta, double sigma, double scale) {
  double s2 = sigma * sigma;
  double support = 0.5 * s2 * std::abs(beta) + std::sqrt(0.25 * s2 * s2 * beta * beta + 80.0 * s2);
  return SpectralDensity{
      [=](double w) { return scale * std::exp(0.5 * beta * w - w * w / (2.0 * s2)); }, support};
}

SpectralDensity sech_kms_density(double beta, double scale) {
  double decay = 1.0 - 0.5 * std::abs(beta);
  double support = decay > 0 ? 40.0 / decay : std::numeric_limits<double>::infinity();
  return SpectralDensity{[=](double w) {
                           double aw = std::abs(w);
                           // e^{beta w/2} * 2 / (e^{|w|} + e^{-|w|}), kept finite for large |w|.
                           return scale * 2.0 * std::exp(0.5 * beta * w - aw) /
                                  (1.0 + std::exp(-2.0 * aw));
                         },
                         support};
}

double principal_value(const SpectralDensity& h, double a) {
  if (!std::isfinite(h.support)) {
    throw NumericalError("principal_value: spectral density does not decay");
  }
  const double upper = h.support + std::abs(a) + 1.0;
  auto g = [&](double u) { return (h(a + u) - h(a - u)) / u; };
  auto truncated = [&](double delta) {
    double sum = 0.0;
    for (double lo = delta; lo < upper; lo *= 2.0) sum += integrate(g, lo, std::min(2.0 * lo, upper));
    return sum;
  };
  const double delta = 0.02;
  double i1 = truncated(delta), i2 = truncated(delta / 2), i4 = truncated(delta / 4);
  double r12 = 2.0 * i2 - i1;
  double r24 = 2.0 * i4 - i2;
  return (8.0 * r24 - r12) / 7.0;
}

IdealizedKernel idealized_limit(const RealVector& energies, const ComplexMatrix& s_eig,
                                const SpectralDensity& htilde, double beta, double lambda2t,
                                double t) {
  const int n = static_cast<int>(energies.size());
  if (s_eig.rows() != n || s_eig.cols() != n) throw DimensionError("idealized_limit: size mismatch");
  if (!(lambda2t >= 0)) throw InvariantError("idealized_limit: lambda^2 t must be >= 0");

  IdealizedKernel out;
  out.htilde = htilde;
  std::vector<double> probes = {0.0, 0.25, 0.5, 1.0, 2.0};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) probes.push_back(std::abs(energies(a) - energies(b)));
  }
  for (double w : probes) {
    double lhs = htilde(-w), rhs = std::exp(-beta * w) * htilde(w);
    out.kms_error = std::max(out.kms_error, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  if (out.kms_error > 1e-10) {
    throw InvariantError("idealized_limit: spectral density violates the KMS relation (error " +
                         std::to_string(out.kms_error) + ")");
  }

  RealMatrix s2 = s_eig.cwiseAbs2();
  RealVector g = RealVector::Zero(n);  // Re g(E_n)
  for (int a = 0; a < n; ++a) {
    for (int l = 0; l < n; ++l) g(a) += s2(l, a) * htilde(energies(a) - energies(l));
  }

  const double two_pi = 2.0 * M_PI;
  out.p_matrix = RealMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      if (m != k) out.p_matrix(m, k) = lambda2t * two_pi * s2(m, k) * htilde(energies(k) - energies(m));
    }
    out.p_matrix(k, k) = 1.0 - out.p_matrix.col(k).sum();
  }

  RealVector pv = RealVector::Zero(n);
  bool have_pv = std::isfinite(htilde.support);
  if (have_pv) {
    for (int a = 0; a < n; ++a) {
      for (int l = 0; l < n; ++l) {
        if (s2(l, a) > 0) pv(a) += s2(l, a) * principal_value(htilde, energies(a) - energies(l));
      }
    }
  } else {
    out.warnings.push_back("spectral density does not decay; principal-value shifts omitted");
  }

  const double h0 = htilde(0.0);
  out.mu_offdiag = ComplexMatrix::Ones(n, n);
  for (int a = 0; a < n; ++a) {
    out.conditions.condition1 = std::max(out.conditions.condition1, lambda2t * two_pi * g(a));
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      double sab = s_eig(a, a).real() * s_eig(b, b).real();
      Complex bracket(two_pi * sab * h0 - M_PI * (g(a) + g(b)), -(pv(a) - pv(b)));
      out.mu_offdiag(a, b) =
          std::polar(1.0, t * (energies(a) - energies(b))) * (1.0 + lambda2t * bracket);
      out.conditions.condition2 = std::max(
          out.conditions.condition2, lambda2t * M_PI * std::abs(-sab * h0 + 0.5 * g(a) + 0.5 * g(b)));
    }
  }
  if (out.conditions.condition1 >= 1.0) out.warnings.push_back("condition 1 margin >= 1");
  if (out.conditions.condition2 >= 1.0) out.warnings.push_back("condition 2 margin >= 1");

  RealVector gw = gibbs_weights(energies, beta);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      out.detailed_balance_error = std::max(
          out.detailed_balance_error, std::abs(out.p_matrix(a, b) * gw(b) - out.p_matrix(b, a) * gw(a)));
    }
  }
  if (out.detailed_balance_error > 1e-10) {
    throw InvariantError("idealized_limit: detailed balance violated (error " +
                         std::to_string(out.detailed_balance_error) + ")");
  }
  return out;
}

double validity_prefactor(int n, int k) {
  if (k < 2) throw InvariantError("validity_conditions: k must be >= 2");
  const double root3 = std::sqrt(3.0);
  if (n == 1) return 8.0 * M_PI * std::sqrt(2.0) / (3.0 * root3) * binomial2(k);
  return 16.0 * M_PI / (3.0 * root3) * binomial2(k) * std::sqrt(static_cast<double>(binomial2(n)));
}

Validity validity_conditions(int n, int k, double lambda, double t, double beta) {
  if (n < 1) throw InvariantError("validity_conditions: n must be >= 1");
  const double l2t = lambda * lambda * t;
  Validity v;
  v.c = n > 1 ? l2t * validity_prefactor(n, k) : 0.0;
  v.c1 = l2t * validity_prefactor(1, k);
  v.beta_prime = beta * ensemble_system_width(n);
  return v;
}

ZenoProbe inverse_zeno_probe(const JointModel& model, double lambda2t, double beta,
                             const std::vector<double>& schedule) {
  if (schedule.empty()) throw InvariantError("inverse_zeno_probe: empty schedule");
  for (size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) throw InvariantError("inverse_zeno_probe: schedule must descend");
  }
  DensityMatrix rho_b = gibbs_state(model.h_b, beta);
  double b2 = (model.b_op.matrix() * model.b_op.matrix() * rho_b.matrix()).trace().real();
  if (!(b2 > 0)) throw InvariantError("inverse_zeno_probe: <B^2>_b must be > 0");

  ZenoProbe out;
  HermitianSpectrum hs = eigh(model.h_s);
  ComplexMatrix s_eig = hs.vectors.adjoint() * model.s_op.matrix() * hs.vectors;
  const int n = model.h_s.dim();
  double scale = std::max(1.0, s_eig.cwiseAbs().maxCoeff());
  for (int a = 0; a < n; ++a) {
    double off = 0.0;
    for (int l = 0; l < n; ++l) {
      if (l != a) off += std::norm(s_eig(l, a));
    }
    if (off < 1e-20 * scale * scale) out.shares_eigenspace = true;
  }
  for (Eigen::Index i = 1; i < hs.values.size(); ++i) {
    if (hs.values(i) - hs.values(i - 1) < kMinLevelSpacing) out.shares_eigenspace = true;
  }
  out.assertion_enabled = !out.shares_eigenspace;

  const ComplexMatrix mixed = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  for (double t : schedule) {
    JointModel m = model;
    m.lambda = std::sqrt(lambda2t / t);
    Superoperator s = build_superoperator(m, t, beta);
    out.times.push_back(t);
    out.lambdas.push_back(m.lambda);
    out.mixed_residuals.push_back(trace_norm(s.apply(mixed) - mixed));
    if (out.assertion_enabled) {
      ChannelSpectrum spec = channel_spectrum(s);
      out.distances.push_back(trace_norm(spec.fixed_point.matrix() - mixed));
    } else {
      out.distances.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  out.decreasing = out.assertion_enabled;
  for (size_t i = 1; i < out.distances.size() && out.decreasing; ++i) {
    if (!(out.distances[i] < out.distances[i - 1])) out.decreasing = false;
  }
  return out;
}

}  // namespace qequil
