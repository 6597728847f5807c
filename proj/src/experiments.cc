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

#include "qequil/experiments.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qequil/channels.h"
#include "qequil/errors.h"
#include "qequil/hamiltonians.h"
#include "qequil/markov2.h"
#include "qequil/observables.h"
#include "qequil/parallel.h"
#include "qequil/perturbation.h"

namespace qequil {

namespace {

using json = nlohmann::json;

// Stream labels; a sample's stream never depends on beta.
constexpr std::uint64_t kSystemTag = 0x5359;
constexpr std::uint64_t kSampleTag = 0x534D;
constexpr std::uint64_t kInteractionTag = 0x494E;
constexpr std::uint64_t kDosTag = 0x444F;
constexpr std::uint64_t kDmTag = 0x444D;
constexpr std::uint64_t kZenoTag = 0x5A45;
constexpr std::uint64_t kChainTag = 0x4348;
constexpr int kMaxAttempts = 20;

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names = {
      {"dos_histogram", ExperimentKind::kDosHistogram},
      {"bath_ensemble", ExperimentKind::kBathEnsemble},
      {"beta_sweep", ExperimentKind::kBetaSweep},
      {"zeno_probe", ExperimentKind::kZenoProbe},
      {"chain2_sweep", ExperimentKind::kChain2Sweep},
      {"random_dm_distance", ExperimentKind::kRandomDmDistance},
      {"correlation_sweep", ExperimentKind::kCorrelationSweep},
  };
  return names;
}

template <typename T>
T read(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

HermitianOperator pauli_sum(const std::string& spec) {
  static const ComplexMatrix x = (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
  static const ComplexMatrix y = (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const ComplexMatrix z = (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished();
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  size_t pos = 0;
  while (pos <= spec.size()) {
    size_t end = spec.find('+', pos);
    std::string tok = spec.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    if (tok == "x") {
      out += x;
    } else if (tok == "y") {
      out += y;
    } else if (tok == "z") {
      out += z;
    } else if (tok == "i") {
      out += ComplexMatrix::Identity(2, 2);
    } else {
      throw ConfigError("unknown Pauli term '" + tok + "' in '" + spec + "'");
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return HermitianOperator(out);
}

void add_numeric_groups(ExperimentResult& result, const std::vector<std::string>& key_columns,
                        const std::vector<std::string>& value_columns,
                        const std::map<std::string, std::vector<double>>& hist_edges) {
  std::vector<std::vector<double>> keys;
  for (const std::string& c : key_columns) keys.push_back(result.table.numeric_column(c));
  std::vector<std::vector<double>> values;
  for (const std::string& c : value_columns) values.push_back(result.table.numeric_column(c));
  std::vector<std::vector<double>> seen;
  const size_t rows = result.table.rows.size();
  for (size_t r = 0; r < rows; ++r) {
    std::vector<double> key;
    for (const auto& col : keys) key.push_back(col[r]);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
  }
  for (const auto& key : seen) {
    Group g;
    for (size_t i = 0; i < key_columns.size(); ++i) g.keys[key_columns[i]] = key[i];
    for (size_t v = 0; v < value_columns.size(); ++v) {
      std::vector<double> sel;
      for (size_t r = 0; r < rows; ++r) {
        bool match = true;
        for (size_t i = 0; i < keys.size(); ++i) match = match && keys[i][r] == key[i];
        if (match) sel.push_back(values[v][r]);
      }
      g.aggregates[value_columns[v]] = aggregate(sel);
      auto it = hist_edges.find(value_columns[v]);
      if (it != hist_edges.end()) g.histograms[value_columns[v]] = histogram(sel, it->second);
    }
    result.groups.push_back(std::move(g));
  }
}

struct SystemSetup {
  HermitianOperator hs;
  HermitianSpectrum spectrum;
  RealVector start_populations;  // |0...0> in the H_s eigenbasis
  int attempts;
};

SystemSetup draw_system(const ExperimentConfig& cfg, std::string* json_out) {
  if (!cfg.system_json.empty()) {
    LocalHamiltonian h = hamiltonian_from_json(cfg.system_json);
    HermitianOperator dense = assemble(h);
    HermitianSpectrum spec = eigh(dense);
    RealVector start = spec.vectors.row(0).cwiseAbs2().transpose();
    *json_out = cfg.system_json;
    return SystemSetup{dense, spec, start, 0};
  }
  Stream stream(cfg.seed, {kSystemTag, static_cast<std::uint64_t>(cfg.n)});
  double min_gap = cfg.min_gap_fraction * cfg.scale_a * ensemble_system_width(cfg.n);
  SystemDraw draw = sample_nondegenerate_system(cfg.n, cfg.scale_a, min_gap, stream);
  HermitianSpectrum spec = eigh(draw.dense);
  RealVector start = spec.vectors.row(0).cwiseAbs2().transpose();
  *json_out = hamiltonian_to_json(draw.h);
  return SystemSetup{draw.dense, spec, start, draw.attempts};
}

SampleRecord ensemble_sample(const ExperimentConfig& cfg, const SystemSetup& sys, int k,
                             double beta_prime, double beta, int index, int attempt,
                             const Interaction* fixed) {
  Stream stream(cfg.seed, {kSampleTag, static_cast<std::uint64_t>(k),
                           static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(attempt)});
  const int n = cfg.n;
  HermitianOperator hb = assemble(sample_bath(k, bath_scale(n, k) * cfg.scale_a, stream));
  DensityMatrix rho_b = gibbs_state(hb, beta);
  Interaction inter = fixed ? Interaction{fixed->s_op, center_bath_operator(fixed->b_op, rho_b)}
                            : sample_interaction(n, k, rho_b, stream);
  JointModel model{n, k, sys.hs, hb, inter.s_op, inter.b_op, cfg.lambda};
  ChannelBuilder builder(model, beta, cfg.max_qubits);
  RealVector gibbs = gibbs_weights(sys.spectrum.values, beta);
  std::vector<double> ts = time_grid(cfg, k);
  std::vector<double> d, rd, rnd, kd, knd;
  const double pref = cfg.lambda * cfg.lambda * validity_prefactor(n, k);
  for (double t : ts) {
    ComplexMatrix se = superop_in_basis(builder.at(t).matrix(), sys.spectrum.vectors);
    SectorAnalysis sa = sector_analysis_exact(se, sys.spectrum.values, pref * t, sys.start_populations);
    if (sa.kappa_d > 1 + 1e-9 || sa.kappa_nd > 1 + 1e-9) {
      throw NumericalError("ensemble: |kappa| exceeds 1 at t = " + format_double(t));
    }
    d.push_back((sa.fixed_populations - gibbs).cwiseAbs().sum());
    rd.push_back(sa.rate_d);
    rnd.push_back(sa.rate_nd);
    kd.push_back(sa.kappa_d);
    knd.push_back(sa.kappa_nd);
  }
  SampleRecord rec;
  rec.k = k;
  rec.beta_prime = beta_prime;
  rec.beta = beta;
  rec.sample = index;
  rec.d_bar = time_average(ts, d);
  rec.rate_d = time_average(ts, rd);
  rec.rate_nd = time_average(ts, rnd);
  rec.kappa_d = time_average(ts, kd);
  rec.kappa_nd = time_average(ts, knd);
  rec.attempts = attempt + 1;
  return rec;
}

ExperimentResult run_ensemble_kind(const ExperimentConfig& cfg) {
  return ensemble_result(cfg, run_bath_ensemble(cfg));
}

ExperimentResult run_dos_kind(const ExperimentConfig& cfg) {
  DosResult dos = run_dos_histogram(cfg);
  ExperimentResult r;
  r.table.columns = {"source", "sample", "level", "energy"};
  const int ns = 1 << cfg.n, nb = 1 << cfg.k;
  for (size_t i = 0; i < dos.system.size(); ++i) {
    r.table.rows.push_back({std::string("system"), static_cast<std::int64_t>(i / ns),
                            static_cast<std::int64_t>(i % ns), dos.system[i]});
  }
  for (size_t i = 0; i < dos.bath.size(); ++i) {
    r.table.rows.push_back({std::string("bath"), static_cast<std::int64_t>(i / nb),
                            static_cast<std::int64_t>(i % nb), dos.bath[i]});
  }
  std::vector<double> edges = uniform_edges(-cfg.dos_range, cfg.dos_range, cfg.dos_bins);
  auto moments = [&](const std::vector<double>& e, Group& g) {
    g.aggregates["energy"] = aggregate(e);
    g.histograms["energy"] = histogram(e, edges);
    double m2 = 0, m3 = 0;
    for (double v : e) {
      m2 += v * v;
      m3 += v * v * v;
    }
    m2 /= e.size();
    m3 /= e.size();
    g.scalars["variance"] = m2;
    g.scalars["skewness"] = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    g.scalars["skewness_stderr"] = std::sqrt(6.0 / e.size());
    return m2;
  };
  Group gs, gb;
  gs.keys["source_system"] = 1;
  gb.keys["source_system"] = 0;
  double vs = moments(dos.system, gs);
  double vb = moments(dos.bath, gb);
  r.groups = {gs, gb};
  r.scalars["variance_ratio"] = vb > 0 ? vs / vb : 0.0;
  return r;
}

ExperimentResult run_dm_kind(const ExperimentConfig& cfg) {
  std::vector<DistanceRow> rows = run_random_dm_distance(cfg);
  ExperimentResult r;
  r.table.columns = {"dim", "sample", "distance"};
  for (const DistanceRow& row : rows) {
    for (size_t i = 0; i < row.samples.size(); ++i) {
      r.table.rows.push_back({static_cast<std::int64_t>(row.dim), static_cast<std::int64_t>(i),
                              row.samples[i]});
    }
  }
  add_numeric_groups(r, {"dim"}, {"distance"}, {{"distance", uniform_edges(0, 2, cfg.hist_bins)}});
  return r;
}

ExperimentResult run_zeno_kind(const ExperimentConfig& cfg) {
  struct Out {
    ZenoProbe probe;
    int attempts;
  };
  std::vector<Out> outs(cfg.samples);
  const double beta = raw_beta(cfg, cfg.betas.at(0));
  parallel_for(cfg.samples, cfg.threads, [&](int i) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Stream stream(cfg.seed, {kZenoTag, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(attempt)});
      HermitianOperator hs = assemble(sample_pair_terms(cfg.n, cfg.scale_a, stream));
      HermitianOperator hb = assemble(sample_bath(cfg.k, bath_scale(cfg.n, cfg.k) * cfg.scale_a, stream));
      Interaction inter = sample_interaction(cfg.n, cfg.k, gibbs_state(hb, beta), stream);
      JointModel model{cfg.n, cfg.k, hs, hb, inter.s_op, inter.b_op, 0.0};
      ZenoProbe p = inverse_zeno_probe(model, cfg.lambda2t, beta, cfg.schedule);
      if (p.assertion_enabled || attempt + 1 == kMaxAttempts) {
        outs[i] = Out{std::move(p), attempt + 1};
        return;
      }
    }
  });
  ExperimentResult r;
  r.table.columns = {"sample", "t", "lambda", "distance", "mixed_residual", "decreasing", "attempts"};
  int decreasing = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    const ZenoProbe& p = outs[i].probe;
    decreasing += p.decreasing ? 1 : 0;
    for (size_t j = 0; j < p.times.size(); ++j) {
      r.table.rows.push_back({static_cast<std::int64_t>(i), p.times[j], p.lambdas[j], p.distances[j],
                              p.mixed_residuals[j], static_cast<std::int64_t>(p.decreasing ? 1 : 0),
                              static_cast<std::int64_t>(outs[i].attempts)});
    }
  }
  add_numeric_groups(r, {"t"}, {"distance", "mixed_residual"}, {});
  r.scalars["fraction_decreasing"] = cfg.samples ? static_cast<double>(decreasing) / cfg.samples : 0.0;
  r.scalars["beta"] = beta;
  return r;
}

ExperimentResult run_chain2_kind(const ExperimentConfig& cfg) {
  struct Row {
    int n;
    double beta_prime, beta;
    int m;
    double gibbs_l1, e_norm, kappa_abs, bound, actual;
    bool valid;
  };
  std::vector<std::vector<Row>> out(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](int i) {
    const int n = 1 + i % cfg.n;
    Stream stream(cfg.seed, {kChainTag, static_cast<std::uint64_t>(i)});
    SystemDraw draw = sample_nondegenerate_system(n, cfg.scale_a, 1e-8, stream);
    RealVector e = eigh(draw.dense).values;
    for (double bp : cfg.betas) {
      double beta = cfg.beta_scaled ? bp / (cfg.scale_a * ensemble_system_width(n)) : bp;
      MarkovMatrix p = exact_chain(e, beta);
      RealVector g = gibbs_weights(e, beta);
      double l1 = (stationary_distribution(p) - g).cwiseAbs().sum();
      for (int m : cfg.m_bits) {
        MarkovMatrix pp = approximate_chain(phase_kernel(e, m, cfg.slack), beta);
        ChainPerturbation cp = chain_perturbation_bound(p, pp);
        out[i].push_back(Row{n, bp, beta, m, l1, cp.e_norm, std::abs(cp.kappa), cp.bound, cp.actual,
                             cp.valid});
      }
    }
  });
  ExperimentResult r;
  r.table.columns = {"sample", "n", "beta_prime", "beta", "m_bits", "gibbs_l1",
                     "e_norm", "kappa_abs", "bound", "actual", "valid"};
  for (int i = 0; i < cfg.samples; ++i) {
    for (const Row& row : out[i]) {
      r.table.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(row.n),
                              row.beta_prime, row.beta, static_cast<std::int64_t>(row.m), row.gibbs_l1,
                              row.e_norm, row.kappa_abs, row.bound, row.actual,
                              static_cast<std::int64_t>(row.valid ? 1 : 0)});
    }
  }
  add_numeric_groups(r, {"beta_prime", "m_bits"}, {"gibbs_l1", "actual", "valid"}, {});
  for (Group& g : r.groups) {
    int valid = 0, violations = 0;
    for (int i = 0; i < cfg.samples; ++i) {
      for (const Row& row : out[i]) {
        if (row.beta_prime != g.keys["beta_prime"] || row.m != g.keys["m_bits"]) continue;
        if (row.valid) {
          ++valid;
          if (row.actual > row.bound) ++violations;
        }
      }
    }
    g.scalars["valid_count"] = valid;
    g.scalars["bound_violations"] = violations;
  }
  return r;
}

ExperimentResult run_correlation_kind(const ExperimentConfig& cfg) {
  HermitianOperator h = pauli_sum(cfg.hamiltonian);
  HermitianOperator o1 = pauli_sum(cfg.o1);
  HermitianOperator o2 = pauli_sum(cfg.o2);
  ExperimentResult r;
  r.table.columns = {"beta", "t", "re", "im", "delta_o2", "prediction", "residual"};
  for (double bp : cfg.betas) {
    double beta = raw_beta(cfg, bp);
    DensityMatrix rho = gibbs_state(h, beta);
    for (int j = 0; j < cfg.t_points; ++j) {
      double t = cfg.t_points > 1 ? cfg.t_max * j / (cfg.t_points - 1) : 0.0;
      Complex c = correlation_2pt(rho, o1, o2, h, t);
      LinearResponse lr = linear_response_experiment(h, rho, o1, o2, cfg.lambda_kick, t);
      r.table.rows.push_back({beta, t, c.real(), c.imag(), lr.delta_o2, lr.prediction, lr.residual});
    }
  }
  add_numeric_groups(r, {"beta"}, {"residual"}, {});
  return r;
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names()) {
    if (k == kind) return name.c_str();
  }
  return "unknown";
}

const char* sweep_mode_name(SweepMode mode) {
  return mode == SweepMode::kFixSystemAndInteraction ? "fix_system_and_interaction"
                                                     : "resample_interaction";
}

ExperimentKind kind_from_name(const std::string& name) {
  auto it = kind_names().find(name);
  if (it == kind_names().end()) throw ConfigError("unknown experiment kind '" + name + "'");
  return it->second;
}

std::vector<int> ExperimentConfig::effective_k_values() const {
  return k_values.empty() ? std::vector<int>{k} : k_values;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (n < 1 || n > 8) fail("n must be in [1, 8]");
  if (samples < 1) fail("samples must be >= 1");
  if (!(c_lo < c_hi) || c_lo < 0) fail("c_interval must satisfy 0 <= low < high");
  if (time_points < 1) fail("time_points must be >= 1");
  if (!(lambda >= 0)) fail("lambda must be >= 0");
  if (betas.empty()) fail("betas must be non-empty");
  for (double b : betas) {
    if (!(b >= 0) || !std::isfinite(b)) fail("betas must be finite and >= 0");
  }
  if (max_qubits < 2 || max_qubits > 12) fail("max_qubits must be in [2, 12]");
  if (!(scale_a >= 0)) fail("scale_a must be >= 0");
  if (!(min_gap_fraction >= 0)) fail("min_gap_fraction must be >= 0");
  if (hist_bins < 1 || dos_bins < 1) fail("histogram bin counts must be >= 1");
  if (kind == ExperimentKind::kBathEnsemble || kind == ExperimentKind::kBetaSweep ||
      kind == ExperimentKind::kZenoProbe) {
    for (int kk : effective_k_values()) {
      if (kk < 2) fail("k must be >= 2");
      if (n + kk > max_qubits) fail("n + k exceeds max_qubits");
    }
  }
  if (kind == ExperimentKind::kDosHistogram && (k < 1 || n > 8 || k > 8)) fail("dos sizes out of range");
  if (kind == ExperimentKind::kRandomDmDistance) {
    for (int d : dims) {
      if (d < 1 || d > 256) fail("dims must be in [1, 256]");
    }
  }
  if (kind == ExperimentKind::kZenoProbe) {
    if (schedule.empty()) fail("schedule must be non-empty");
    for (size_t i = 0; i < schedule.size(); ++i) {
      if (!(schedule[i] > 0)) fail("schedule times must be > 0");
      if (i && !(schedule[i] < schedule[i - 1])) fail("schedule must descend");
    }
    if (!(lambda2t > 0)) fail("lambda2t must be > 0");
  }
  if (kind == ExperimentKind::kChain2Sweep) {
    if (n > 4) fail("chain2 n must be <= 4");
    for (int m : m_bits) {
      if (m < 1 || m > 16) fail("m_bits must be in [1, 16]");
    }
    if (!(slack >= 0)) fail("slack must be >= 0");
  }
  if (kind == ExperimentKind::kCorrelationSweep && t_points < 1) fail("t_points must be >= 1");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kDosHistogram:
      c.n = 5;
      c.k = 5;
      c.samples = 500;
      c.beta_scaled = false;
      break;
    case ExperimentKind::kBathEnsemble:
      c.n = 2;
      c.k = 2;
      c.k_values = {2, 3, 4, 5, 6};
      c.betas = {2.0};
      break;
    case ExperimentKind::kBetaSweep:
      c.n = 2;
      c.k = 2;
      c.k_values = {2, 3, 4, 5, 6};
      c.betas = {0.5, 1.0, 2.0, 3.0, 5.0};
      break;
    case ExperimentKind::kZenoProbe:
      c.n = 1;
      c.k = 2;
      c.betas = {1.0};
      c.beta_scaled = false;
      c.samples = 10;
      break;
    case ExperimentKind::kChain2Sweep:
      c.n = 4;
      c.betas = {0.5, 2.0, 5.0};
      c.beta_scaled = false;
      c.samples = 20;
      break;
    case ExperimentKind::kRandomDmDistance:
      c.samples = 1000;
      break;
    case ExperimentKind::kCorrelationSweep:
      c.n = 1;
      c.betas = {0.5, 1.0, 3.0};
      c.beta_scaled = false;
      c.samples = 1;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const std::string& text, ExperimentKind kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = default_config(kind);
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"kind", [&](const json& v, const std::string& k) {
         if (kind_from_name(read<std::string>(v, k)) != kind) {
           throw ConfigError("config kind '" + v.get<std::string>() + "' does not match the subcommand");
         }
       }},
      {"n", [&](const json& v, const std::string& k) { c.n = read<int>(v, k); }},
      {"k", [&](const json& v, const std::string& k) { c.k = read<int>(v, k); }},
      {"k_values", [&](const json& v, const std::string& k) { c.k_values = read<std::vector<int>>(v, k); }},
      {"betas", [&](const json& v, const std::string& k) { c.betas = read<std::vector<double>>(v, k); }},
      {"beta_scaled", [&](const json& v, const std::string& k) { c.beta_scaled = read<bool>(v, k); }},
      {"lambda", [&](const json& v, const std::string& k) { c.lambda = read<double>(v, k); }},
      {"c_interval", [&](const json& v, const std::string& k) {
         auto p = read<std::vector<double>>(v, k);
         if (p.size() != 2) throw ConfigError("c_interval must have two entries");
         c.c_lo = p[0];
         c.c_hi = p[1];
       }},
      {"time_points", [&](const json& v, const std::string& k) { c.time_points = read<int>(v, k); }},
      {"samples", [&](const json& v, const std::string& k) { c.samples = read<int>(v, k); }},
      {"seed", [&](const json& v, const std::string& k) { c.seed = read<std::uint64_t>(v, k); }},
      {"sweep_mode", [&](const json& v, const std::string& k) {
         std::string m = read<std::string>(v, k);
         if (m == "fix_system_and_interaction") {
           c.sweep_mode = SweepMode::kFixSystemAndInteraction;
         } else if (m == "resample_interaction") {
           c.sweep_mode = SweepMode::kResampleInteraction;
         } else {
           throw ConfigError("unknown sweep_mode '" + m + "'");
         }
       }},
      {"min_gap_fraction", [&](const json& v, const std::string& k) { c.min_gap_fraction = read<double>(v, k); }},
      {"max_qubits", [&](const json& v, const std::string& k) { c.max_qubits = read<int>(v, k); }},
      {"threads", [&](const json& v, const std::string& k) { c.threads = read<int>(v, k); }},
      {"scale_a", [&](const json& v, const std::string& k) { c.scale_a = read<double>(v, k); }},
      {"d_hist_max", [&](const json& v, const std::string& k) { c.d_hist_max = read<double>(v, k); }},
      {"rate_hist_max", [&](const json& v, const std::string& k) { c.rate_hist_max = read<double>(v, k); }},
      {"hist_bins", [&](const json& v, const std::string& k) { c.hist_bins = read<int>(v, k); }},
      {"dos_range", [&](const json& v, const std::string& k) { c.dos_range = read<double>(v, k); }},
      {"dos_bins", [&](const json& v, const std::string& k) { c.dos_bins = read<int>(v, k); }},
      {"dims", [&](const json& v, const std::string& k) { c.dims = read<std::vector<int>>(v, k); }},
      {"lambda2t", [&](const json& v, const std::string& k) { c.lambda2t = read<double>(v, k); }},
      {"schedule", [&](const json& v, const std::string& k) { c.schedule = read<std::vector<double>>(v, k); }},
      {"m_bits", [&](const json& v, const std::string& k) { c.m_bits = read<std::vector<int>>(v, k); }},
      {"slack", [&](const json& v, const std::string& k) { c.slack = read<double>(v, k); }},
      {"hamiltonian", [&](const json& v, const std::string& k) { c.hamiltonian = read<std::string>(v, k); }},
      {"o1", [&](const json& v, const std::string& k) { c.o1 = read<std::string>(v, k); }},
      {"o2", [&](const json& v, const std::string& k) { c.o2 = read<std::string>(v, k); }},
      {"t_max", [&](const json& v, const std::string& k) { c.t_max = read<double>(v, k); }},
      {"t_points", [&](const json& v, const std::string& k) { c.t_points = read<int>(v, k); }},
      {"lambda_kick", [&](const json& v, const std::string& k) { c.lambda_kick = read<double>(v, k); }},
      {"system", [&](const json& v, const std::string&) {
         c.system_json = v.dump();
         if (hamiltonian_from_json(c.system_json).n_qubits != c.n && j.contains("n")) {
           throw ConfigError("system hamiltonian size does not match n");
         }
       }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(value, key);
  }
  if (!c.system_json.empty()) c.n = hamiltonian_from_json(c.system_json).n_qubits;
  if (kind == ExperimentKind::kCorrelationSweep) {
    pauli_sum(c.hamiltonian);
    pauli_sum(c.o1);
    pauli_sum(c.o2);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j = {
      {"kind", kind_name(c.kind)},
      {"n", c.n},
      {"k", c.k},
      {"k_values", c.effective_k_values()},
      {"betas", c.betas},
      {"beta_scaled", c.beta_scaled},
      {"lambda", c.lambda},
      {"c_interval", {c.c_lo, c.c_hi}},
      {"time_points", c.time_points},
      {"samples", c.samples},
      {"seed", c.seed},
      {"sweep_mode", sweep_mode_name(c.sweep_mode)},
      {"min_gap_fraction", c.min_gap_fraction},
      {"max_qubits", c.max_qubits},
      {"scale_a", c.scale_a},
      {"d_hist_max", c.d_hist_max},
      {"rate_hist_max", c.rate_hist_max},
      {"hist_bins", c.hist_bins},
      {"dos_range", c.dos_range},
      {"dos_bins", c.dos_bins},
      {"dims", c.dims},
      {"lambda2t", c.lambda2t},
      {"schedule", c.schedule},
      {"m_bits", c.m_bits},
      {"slack", c.slack},
      {"hamiltonian", c.hamiltonian},
      {"o1", c.o1},
      {"o2", c.o2},
      {"t_max", c.t_max},
      {"t_points", c.t_points},
      {"lambda_kick", c.lambda_kick},
  };
  if (!c.system_json.empty()) j["system"] = json::parse(c.system_json);
  return j.dump();
}

double raw_beta(const ExperimentConfig& cfg, double beta) {
  return cfg.beta_scaled ? beta / (cfg.scale_a * ensemble_system_width(cfg.n)) : beta;
}

std::vector<double> time_grid(const ExperimentConfig& cfg, int k) {
  double rate = cfg.lambda * cfg.lambda * validity_prefactor(cfg.n, k);
  double t_lo = rate > 0 ? cfg.c_lo / rate : 0.0;
  double t_hi = rate > 0 ? cfg.c_hi / rate : 1.0;
  std::vector<double> ts(cfg.time_points);
  for (int j = 1; j <= cfg.time_points; ++j) ts[j - 1] = t_lo + (t_hi - t_lo) * j / cfg.time_points;
  return ts;
}

double time_average(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty()) throw Error("time_average: size mismatch");
  if (t.size() == 1) return y[0];
  double acc = 0.0;
  for (size_t i = 1; i < t.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return acc / (t.back() - t.front());
}

EnsembleStats run_bath_ensemble(const ExperimentConfig& cfg) {
  cfg.validate();
  std::string system_json;
  SystemSetup sys = draw_system(cfg, &system_json);
  EnsembleStats stats;
  stats.system_energies = sys.spectrum.values;
  stats.system_attempts = sys.attempts;
  stats.system_json = system_json;
  for (int k : cfg.effective_k_values()) {
    std::optional<Interaction> fixed;
    if (cfg.sweep_mode == SweepMode::kFixSystemAndInteraction) {
      Stream stream(cfg.seed, {kInteractionTag, static_cast<std::uint64_t>(k)});
      HermitianOperator s = assemble(sample_pair_terms(cfg.n, 1.0, stream));
      HermitianOperator b = assemble(sample_pair_terms(k, 1.0, stream));
      fixed = Interaction{s, b};
    }
    for (double bp : cfg.betas) {
      const double beta = raw_beta(cfg, bp);
      const double beta_prime = beta * cfg.scale_a * ensemble_system_width(cfg.n);
      std::vector<SampleRecord> recs(cfg.samples);
      parallel_for(cfg.samples, cfg.threads, [&](int i) {
        for (int attempt = 0;; ++attempt) {
          try {
            recs[i] = ensemble_sample(cfg, sys, k, beta_prime, beta, i, attempt,
                                      fixed ? &*fixed : nullptr);
            return;
          } catch (const DegenerateSpectrumError&) {
            if (attempt + 1 >= kMaxAttempts) throw;
          } catch (const NumericalError&) {
            if (attempt + 1 >= kMaxAttempts) throw;
          }
        }
      });
      for (const SampleRecord& r : recs) {
        stats.resamples += r.attempts - 1;
        stats.records.push_back(r);
      }
    }
  }
  return stats;
}

ExperimentResult ensemble_result(const ExperimentConfig& cfg, const EnsembleStats& stats) {
  ExperimentResult r;
  r.kind = kind_name(cfg.kind);
  r.seed = cfg.seed;
  r.config_json = config_to_json(cfg);
  r.table.columns = {"k", "beta_prime", "beta", "sample", "D", "R_D", "R_ND", "kappa_D", "kappa_ND",
                     "attempts"};
  for (const SampleRecord& s : stats.records) {
    r.table.rows.push_back({static_cast<std::int64_t>(s.k), s.beta_prime, s.beta,
                            static_cast<std::int64_t>(s.sample), s.d_bar, s.rate_d, s.rate_nd,
                            s.kappa_d, s.kappa_nd, static_cast<std::int64_t>(s.attempts)});
  }
  std::vector<double> d_edges = uniform_edges(0.0, cfg.d_hist_max, cfg.hist_bins);
  std::vector<double> r_edges = uniform_edges(0.0, cfg.rate_hist_max, cfg.hist_bins);
  add_numeric_groups(r, {"k", "beta_prime"}, {"D", "R_D", "R_ND", "kappa_D", "kappa_ND"},
                     {{"D", d_edges}, {"R_D", r_edges}, {"R_ND", r_edges}});
  r.attachments["system.json"] = stats.system_json;
  r.scalars["system_attempts"] = stats.system_attempts;
  r.scalars["resamples"] = stats.resamples;
  r.scalars["system_width"] = cfg.scale_a * ensemble_system_width(cfg.n);
  r.scalars["lambda"] = cfg.lambda;
  for (Eigen::Index i = 0; i < stats.system_energies.size(); ++i) {
    r.scalars["system_energy_" + std::to_string(i)] = stats.system_energies(i);
  }
  return r;
}

DosResult run_dos_histogram(const ExperimentConfig& cfg) {
  cfg.validate();
  const int ns = 1 << cfg.n, nb = 1 << cfg.k;
  DosResult out;
  out.system.resize(static_cast<size_t>(cfg.samples) * ns);
  out.bath.resize(static_cast<size_t>(cfg.samples) * nb);
  const double ab = bath_scale(cfg.n, cfg.k) * cfg.scale_a;
  parallel_for(cfg.samples, cfg.threads, [&](int i) {
    Stream stream(cfg.seed, {kDosTag, static_cast<std::uint64_t>(i)});
    RealVector es = eigh(assemble(sample_pair_terms(cfg.n, cfg.scale_a, stream))).values;
    RealVector eb = eigh(assemble(sample_bath(cfg.k, ab, stream))).values;
    for (int j = 0; j < ns; ++j) out.system[static_cast<size_t>(i) * ns + j] = es(j);
    for (int j = 0; j < nb; ++j) out.bath[static_cast<size_t>(i) * nb + j] = eb(j);
  });
  return out;
}

ComplexMatrix haar_unitary(int dim, Stream& stream) {
  ComplexMatrix z(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) z(i, j) = Complex(stream.normal(), stream.normal()) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

DensityMatrix random_density_matrix(int dim, Stream& stream) {
  RealVector lam(dim);
  for (int i = 0; i < dim; ++i) lam(i) = stream.exponential();
  lam /= lam.sum();
  return DensityMatrix::from_populations(lam, haar_unitary(dim, stream));
}

std::vector<DistanceRow> run_random_dm_distance(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<DistanceRow> rows;
  for (int dim : cfg.dims) {
    DistanceRow row;
    row.dim = dim;
    row.samples.resize(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](int i) {
      Stream stream(cfg.seed, {kDmTag, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(i)});
      DensityMatrix a = random_density_matrix(dim, stream);
      DensityMatrix b = random_density_matrix(dim, stream);
      row.samples[i] = trace_norm(a.matrix() - b.matrix());
    });
    Aggregate agg = aggregate(row.samples);
    row.mean = agg.mean;
    row.stderr_mean = agg.stderr_mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult r;
  switch (cfg.kind) {
    case ExperimentKind::kBathEnsemble:
    case ExperimentKind::kBetaSweep:
      r = run_ensemble_kind(cfg);
      break;
    case ExperimentKind::kDosHistogram:
      r = run_dos_kind(cfg);
      break;
    case ExperimentKind::kRandomDmDistance:
      r = run_dm_kind(cfg);
      break;
    case ExperimentKind::kZenoProbe:
      r = run_zeno_kind(cfg);
      break;
    case ExperimentKind::kChain2Sweep:
      r = run_chain2_kind(cfg);
      break;
    case ExperimentKind::kCorrelationSweep:
      r = run_correlation_kind(cfg);
      break;
  }
  r.kind = kind_name(cfg.kind);
  r.seed = cfg.seed;
  r.config_json = config_to_json(cfg);
  return r;
}

}  // namespace qequil
