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

// Acceptance runner: one PASS/FAIL line per criterion; exits non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qequil/channels.h"
#include "qequil/errors.h"
#include "qequil/experiments.h"
#include "qequil/hamiltonians.h"
#include "qequil/markov2.h"
#include "qequil/matcore.h"
#include "qequil/observables.h"
#include "qequil/perturbation.h"
#include "qequil/rng.h"

namespace {

using namespace qequil;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& v) {
    ss_ << v;
    return *this;
  }
  std::string str() const { return ss_.str(); }

 private:
  std::ostringstream ss_;
};

ComplexMatrix pauli_x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
ComplexMatrix pauli_y() {
  return (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
ComplexMatrix pauli_z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }

JointModel random_model(int n, int k, double lambda, double beta, Stream& stream) {
  HermitianOperator hs = assemble(sample_pair_terms(n, 1.0, stream));
  HermitianOperator hb = assemble(sample_bath(k, bath_scale(n, k), stream));
  Interaction inter = sample_interaction(n, k, gibbs_state(hb, beta), stream);
  return JointModel{n, k, hs, hb, inter.s_op, inter.b_op, lambda};
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Outcome table_ii() {
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = default_config(ExperimentKind::kRandomDmDistance);
  cfg.dims = {4, 16};
  cfg.samples = 1000;
  cfg.seed = 2026;
  std::vector<DistanceRow> rows = run_random_dm_distance(cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = std::abs(rows[0].mean - 0.90388) <= 0.03 && std::abs(rows[1].mean - 1.00294) <= 0.02 &&
           secs < 60.0;
  o.detail = (Detail() << "N=4 mean " << rows[0].mean << ", N=16 mean " << rows[1].mean << ", "
                       << secs << " s")
                 .str();
  return o;
}

Outcome tcp_suite() {
  Stream root(7, {1});
  double worst_col = 0, worst_cross = 0, worst_radius = 0, worst_pair = 0, min_choi = 1;
  for (int i = 0; i < 50; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    int n = 1 + static_cast<int>(s() % 2);
    int k = 1 + static_cast<int>(s() % 3);
    double lambda = s.uniform(0.0, 0.2);
    double t = s.uniform(0.0, 2.0);
    double beta = s.uniform(0.0, 3.0);
    JointModel m = random_model(n, k, lambda, beta, s);
    TcpDiagnostics d = verify_tcp(build_superoperator(m, t, beta), static_cast<std::uint64_t>(i));
    worst_col = std::max(worst_col, d.column_sum_error);
    worst_cross = std::max(worst_cross, d.cross_sum_error);
    worst_radius = std::max(worst_radius, d.spectral_radius);
    worst_pair = std::max(worst_pair, d.conjugate_pairing_error);
    min_choi = std::min(min_choi, d.choi_min_eigenvalue);
  }
  Outcome o;
  o.pass = worst_col < 1e-9 && worst_cross < 1e-9 && min_choi > -1e-9 &&
           worst_radius <= 1 + 1e-9 && worst_pair < 1e-9;
  o.detail = (Detail() << "column " << worst_col << ", cross " << worst_cross << ", choi min "
                       << min_choi << ", radius " << worst_radius << ", pairing " << worst_pair)
                 .str();
  return o;
}

Outcome first_order_vanishing() {
  const std::vector<double> lambdas = {0.02, 0.04, 0.08};
  Stream root(11, {2});
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    const double beta = 1.0, t = 1.0;
    JointModel m = random_model(1 + i % 2, 2, 0.0, beta, s);
    ComplexMatrix s0 = build_superoperator(m, t, beta).matrix();
    std::vector<double> norms;
    for (double l : lambdas) {
      m.lambda = l;
      norms.push_back(op2norm(ComplexMatrix(build_superoperator(m, t, beta).matrix() - s0)));
    }
    double slope = loglog_slope(lambdas, norms);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  Outcome o;
  o.pass = lo >= 1.9 && hi <= 2.1;
  o.detail = (Detail() << "slopes in [" << lo << ", " << hi << "]").str();
  return o;
}

Outcome idealized_structure() {
  Stream root(13, {3});
  double worst_db = 0, worst_stat = 0, min_entry = 1e9, worst_col = 0, max_margin = 0;
  for (int i = 0; i < 20; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    int dim = 2 + static_cast<int>(s() % 5);
    std::vector<double> e(dim);
    for (double& v : e) v = s.uniform(-2.0, 2.0);
    std::sort(e.begin(), e.end());
    RealVector energies = Eigen::Map<RealVector>(e.data(), dim);
    ComplexMatrix a(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) a(r, c) = Complex(s.normal(), s.normal());
    }
    ComplexMatrix s_eig = (a + a.adjoint()) / 2.0;
    double beta = s.uniform(0.2, 3.0);
    SpectralDensity h = i % 2 ? sech_kms_density(beta) : gaussian_kms_density(beta);
    double unit = idealized_limit(energies, s_eig, h, beta, 1.0).conditions.condition1;
    double lambda2t = 0.5 / unit;
    IdealizedKernel ker = idealized_limit(energies, s_eig, h, beta, lambda2t);
    max_margin = std::max(max_margin, ker.conditions.condition1);
    min_entry = std::min(min_entry, ker.p_matrix.minCoeff());
    RealVector cols = ker.p_matrix.colwise().sum().transpose();
    worst_col = std::max(worst_col, (cols.array() - 1.0).abs().maxCoeff());
    RealVector g = gibbs_weights(energies, beta);
    for (int m = 0; m < dim; ++m) {
      for (int n = 0; n < dim; ++n) {
        worst_db = std::max(worst_db, std::abs(ker.p_matrix(m, n) * g(n) - ker.p_matrix(n, m) * g(m)));
      }
    }
    worst_stat = std::max(worst_stat, (ker.p_matrix * g - g).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = max_margin < 1 && min_entry > 0 && worst_col < 1e-10 && worst_db < 1e-10 &&
           worst_stat < 1e-10;
  o.detail = (Detail() << "condition 1 max " << max_margin << ", min entry " << min_entry
                       << ", column sums " << worst_col << ", detailed balance " << worst_db
                       << ", stationarity " << worst_stat)
                 .str();
  return o;
}

Outcome perturbation_vs_exact() {
  Stream root(17, {4});
  double worst = 0;
  const double lambda = 0.01, beta = 1.0;
  const std::vector<double> times = {0.5, 1.0, 2.0};
  for (int i = 0; i < 5; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    JointModel m = random_model(1, 2, lambda, beta, s);
    HermitianSpectrum sys = eigh(m.h_s);
    ComplexMatrix s_eig = sys.vectors.adjoint() * m.s_op.matrix() * sys.vectors;
    BathCorrelation corr = bath_correlation(m.h_b, m.b_op, beta);
    ChannelBuilder builder(m, beta);
    const int dim = 2;
    for (double t : times) {
      ComplexMatrix se = superop_in_basis(builder.at(t).matrix(), sys.vectors);
      RealMatrix q_exact(dim, dim);
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          q_exact(a, b) = (se(a * dim + a, b * dim + b).real() - (a == b ? 1.0 : 0.0)) / (lambda * lambda);
        }
      }
      RealMatrix q = second_order_Q_nu(sys.values, s_eig, corr, t).q;
      worst = std::max(worst, (q - q_exact).norm() / q_exact.norm());
    }
  }
  Outcome o;
  o.pass = worst < 0.05;
  o.detail = (Detail() << "worst relative Frobenius error " << worst).str();
  return o;
}

Outcome algorithm_two() {
  Stream root(19, {5});
  double worst_exact = 0, worst_ratio = 0;
  int valid = 0, violations = 0, cases = 0;
  for (int i = 0; i < 20; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    int n = 1 + i % 4;
    SystemDraw draw = sample_nondegenerate_system(n, 1.0, 1e-6, s);
    RealVector e = eigh(draw.dense).values;
    for (double beta : {0.5, 2.0, 5.0}) {
      ++cases;
      MarkovMatrix p = exact_chain(e, beta);
      RealVector g = gibbs_weights(e, beta);
      worst_exact = std::max(worst_exact, (stationary_distribution(p) - g).cwiseAbs().sum());
      ChainPerturbation cp = chain_perturbation_bound(p, approximate_chain(phase_kernel(e, 6), beta));
      if (cp.valid) {
        ++valid;
        worst_ratio = std::max(worst_ratio, cp.actual / cp.bound);
        if (cp.actual > cp.bound) ++violations;
      }
    }
  }
  Outcome o;
  o.pass = worst_exact <= 1e-12 && violations == 0;
  o.detail = (Detail() << "exact l1 max " << worst_exact << "; bound valid in " << valid << "/"
                       << cases << ", violations " << violations << ", max actual/bound "
                       << worst_ratio)
                 .str();
  return o;
}

Outcome inverse_zeno() {
  const std::vector<double> schedule = {0.4, 0.2, 0.1, 0.05};
  Stream root(23, {6});
  int decreasing = 0, models = 0, skipped = 0;
  std::string first_failure;
  for (int i = 0; models < 10 && i < 200; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i));
    JointModel m = random_model(1, 2, 0.0, 1.0, s);
    ZenoProbe p = inverse_zeno_probe(m, 0.5, 1.0, schedule);
    if (p.shares_eigenspace) {
      ++skipped;
      continue;
    }
    ++models;
    if (p.decreasing) {
      ++decreasing;
    } else if (first_failure.empty()) {
      Detail d;
      for (double v : p.distances) d << v << " ";
      first_failure = d.str();
    }
  }
  Outcome o;
  o.pass = models == 10 && decreasing == 10;
  o.detail = (Detail() << decreasing << "/" << models << " strictly decreasing, " << skipped
                       << " commuting draws skipped"
                       << (first_failure.empty() ? "" : "; first failure: " + first_failure))
                 .str();
  return o;
}

Outcome correlation_oracle() {
  HermitianOperator h(pauli_z());
  HermitianOperator sx(pauli_x());
  double worst = 0;
  for (double beta : {0.5, 1.0, 3.0}) {
    DensityMatrix rho = gibbs_state(h, beta);
    for (int j = 0; j <= 200; ++j) {
      double t = 2 * M_PI * j / 200.0;
      Complex comm = correlation_2pt(rho, sx, sx, h, t);
      Complex expected(0.0, 2 * std::sin(2 * t) * std::tanh(beta));
      worst = std::max(worst, std::abs(comm - expected));
    }
  }
  HermitianOperator o2(ComplexMatrix(pauli_x() + pauli_z()));
  DensityMatrix rho = gibbs_state(h, 1.0);
  const std::vector<double> kicks = {0.01, 0.02, 0.04};
  std::vector<double> residuals;
  for (double l : kicks) residuals.push_back(linear_response_experiment(h, rho, sx, o2, l, 1.0).residual);
  double slope = loglog_slope(kicks, residuals);
  Outcome o;
  o.pass = worst <= 1e-10 && std::abs(slope - 2.0) <= 0.2;
  o.detail = (Detail() << "closed-form max error " << worst << ", residual slope " << slope).str();
  return o;
}

Outcome estimator_calibration() {
  const double delta = 0.05, epsilon = 0.05;
  SamplingPlan plan = sample_count(delta, epsilon);
  const long expected_n = static_cast<long>(std::ceil(std::log(2 / epsilon) / (2 * delta * delta)));
  Stream root(29, {7});
  Stream setup = root.child(0);
  DensityMatrix rho = random_density_matrix(4, setup);
  ComplexMatrix a(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a(r, c) = Complex(setup.normal(), setup.normal());
  }
  HermitianOperator obs(ComplexMatrix((a + a.adjoint()) / 2.0));
  const double truth = (rho.matrix() * obs.matrix()).trace().real();
  int failures = 0;
  bool counts_ok = true;
  const int trials = 500;
  for (int i = 0; i < trials; ++i) {
    Stream s = root.child(static_cast<std::uint64_t>(i + 1));
    Estimate est = estimate_expectation(rho, obs, plan, s);
    counts_ok = counts_ok && est.samples == expected_n;
    if (std::abs(est.value - truth) > est.half_width) ++failures;
  }
  double fraction = static_cast<double>(failures) / trials;
  Outcome o;
  o.pass = plan.n_samples == expected_n && counts_ok && fraction <= 0.08;
  o.detail = (Detail() << "n = " << plan.n_samples << " (expected " << expected_n
                       << "), failure fraction " << fraction)
                 .str();
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome ensemble_claims() {
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = default_config(ExperimentKind::kBetaSweep);
  cfg.n = 2;
  cfg.samples = 100;
  cfg.lambda = 0.01;
  cfg.seed = 1;
  cfg.k_values = {2, 3, 4};
  cfg.betas = {0.5, 1.0, 2.0, 3.0};
  EnsembleStats stats = run_bath_ensemble(cfg);
  auto select = [&](int k, double bp, double SampleRecord::*field) {
    std::vector<double> out;
    for (const SampleRecord& r : stats.records) {
      if (r.k == k && std::abs(r.beta_prime - bp) < 1e-12) out.push_back(r.*field);
    }
    return out;
  };
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  double med_nd = median(select(3, 2.0, &SampleRecord::rate_nd));
  double med_d = median(select(3, 2.0, &SampleRecord::rate_d));
  double d_k2 = mean(select(2, 2.0, &SampleRecord::d_bar));
  double d_k4 = mean(select(4, 2.0, &SampleRecord::d_bar));
  std::vector<double> trend;
  for (double bp : cfg.betas) trend.push_back(mean(select(2, bp, &SampleRecord::d_bar)));
  bool increasing = true;
  for (size_t i = 1; i < trend.size(); ++i) increasing = increasing && trend[i] > trend[i - 1];
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = med_nd > med_d && d_k4 < d_k2 && increasing && secs < 600;
  Detail d;
  d << "k=3 median R_ND " << med_nd << " vs R_D " << med_d << "; mean D k=2 " << d_k2 << " -> k=4 "
    << d_k4 << "; mean D at k=2 over beta'";
  for (double v : trend) d << " " << v;
  d << "; " << secs << " s";
  o.detail = d.str();
  return o;
}

Outcome trotter() {
  std::vector<HermitianOperator> terms = {HermitianOperator(pauli_x()), HermitianOperator(pauli_z())};
  const Complex sigma(0.0, -1.0);
  HermitianOperator h(ComplexMatrix(pauli_x() + pauli_z()));
  ComplexMatrix exact = matrix_exp_herm(h, Complex(0.0, -1.0));
  double e40 = op2norm(ComplexMatrix(trotter_product(terms, sigma, 40) - exact));
  double e80 = op2norm(ComplexMatrix(trotter_product(terms, sigma, 80) - exact));
  Outcome o;
  double ratio = e40 / e80;
  o.pass = ratio >= 1.7 && ratio <= 2.3;
  o.detail = (Detail() << "error 40 steps " << e40 << ", 80 steps " << e80 << ", ratio " << ratio).str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"random density matrix distances", table_ii},
      {"channel TCP properties", tcp_suite},
      {"first-order term vanishes", first_order_vanishing},
      {"idealized-limit chain structure", idealized_structure},
      {"second-order Q against exact channel", perturbation_vs_exact},
      {"phase-estimation chain exactness and bound", algorithm_two},
      {"inverse Zeno trend", inverse_zeno},
      {"correlation closed form and linear response", correlation_oracle},
      {"estimator calibration", estimator_calibration},
      {"bath ensemble trends", ensemble_claims},
      {"Trotter error halving", trotter},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
