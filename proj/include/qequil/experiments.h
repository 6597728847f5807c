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

#ifndef QEQUIL_EXPERIMENTS_H_
#define QEQUIL_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qequil/matcore.h"
#include "qequil/results.h"
#include "qequil/rng.h"

namespace qequil {

enum class ExperimentKind {
  kDosHistogram,
  kBathEnsemble,
  kBetaSweep,
  kZenoProbe,
  kChain2Sweep,
  kRandomDmDistance,
  kCorrelationSweep,
};

enum class SweepMode {
  kFixSystemAndInteraction,
  kResampleInteraction,
};

const char* kind_name(ExperimentKind kind);
const char* sweep_mode_name(SweepMode mode);

/// Declarative description of one experiment. Fields unused by a kind are ignored.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kBathEnsemble;
  int n = 2;
  int k = 2;
  std::vector<int> k_values;  // defaults to {k}
  std::vector<double> betas = {2.0};
  bool beta_scaled = true;  // betas are beta' = beta * W_s
  double lambda = 0.01;
  double c_lo = 0.0;
  double c_hi = 0.5;
  int time_points = 60;
  int samples = 100;
  std::uint64_t seed = 1;
  SweepMode sweep_mode = SweepMode::kResampleInteraction;
  double min_gap_fraction = 0.1;
  int max_qubits = 10;
  int threads = 0;  // 0: default_threads()
  double scale_a = 1.0;
  // Fixed H_s in hamiltonian_to_json form; empty means sampled.
  std::string system_json;

  // Histogram edges.
  double d_hist_max = 2.0;
  double rate_hist_max = 4.0;
  int hist_bins = 20;

  // dos
  double dos_range = 12.0;
  int dos_bins = 48;

  // dm-distance
  std::vector<int> dims = {4, 8, 16};

  // zeno
  double lambda2t = 0.5;
  std::vector<double> schedule = {0.4, 0.2, 0.1, 0.05};

  // chain2
  std::vector<int> m_bits = {6};
  double slack = 0.0;

  // correlate
  std::string hamiltonian = "z";
  std::string o1 = "x";
  std::string o2 = "x";
  double t_max = 6.283185307179586;
  int t_points = 101;
  double lambda_kick = 0.01;

  std::vector<int> effective_k_values() const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Defaults for a kind; ensemble kinds read betas as beta', the others as raw beta.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses a JSON object over default_config(kind); unknown keys and wrong types
/// raise ConfigError.
ExperimentConfig config_from_json(const std::string& text, ExperimentKind kind);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentKind kind_from_name(const std::string& name);

/// Inverse temperature actually used for a configured value.
double raw_beta(const ExperimentConfig& cfg, double beta);

/// Time grid t_1..t_T with c(t_j) spread evenly over (c_lo, c_hi].
std::vector<double> time_grid(const ExperimentConfig& cfg, int k);

/// Trapezoid average over the grid span.
double time_average(const std::vector<double>& t, const std::vector<double>& y);

struct SampleRecord {
  int k = 0;
  double beta_prime = 0.0;
  double beta = 0.0;
  int sample = 0;
  double d_bar = 0.0;
  double rate_d = 0.0;
  double rate_nd = 0.0;
  double kappa_d = 0.0;
  double kappa_nd = 0.0;
  int attempts = 1;
};

struct EnsembleStats {
  std::vector<SampleRecord> records;
  RealVector system_energies;
  std::string system_json;
  int system_attempts = 1;
  int resamples = 0;
};

/// Bath ensemble over every (k, beta) in the config with a single H_s draw.
EnsembleStats run_bath_ensemble(const ExperimentConfig& cfg);
ExperimentResult ensemble_result(const ExperimentConfig& cfg, const EnsembleStats& stats);

struct DosResult {
  std::vector<double> system;
  std::vector<double> bath;
};

DosResult run_dos_histogram(const ExperimentConfig& cfg);

struct DistanceRow {
  int dim = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> samples;
};

/// Haar eigenbasis, eigenvalues uniform on the simplex.
DensityMatrix random_density_matrix(int dim, Stream& stream);
ComplexMatrix haar_unitary(int dim, Stream& stream);
std::vector<DistanceRow> run_random_dm_distance(const ExperimentConfig& cfg);

/// Builds the result table and summary for any kind.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace qequil

#endif  // QEQUIL_EXPERIMENTS_H_
