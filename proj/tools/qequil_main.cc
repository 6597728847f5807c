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

// qequil command-line runner: one subcommand per experiment kind.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qequil/errors.h"
#include "qequil/experiments.h"
#include "qequil/parallel.h"
#include "qequil/results.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Subcommand {
  const char* name;
  qequil::ExperimentKind kind;
  const char* help;
};

const std::vector<Subcommand> kSubcommands = {
    {"dos", qequil::ExperimentKind::kDosHistogram, "Level histograms of sampled system and bath Hamiltonians"},
    {"ensemble", qequil::ExperimentKind::kBathEnsemble, "Equilibration statistics over random baths"},
    {"beta-sweep", qequil::ExperimentKind::kBetaSweep, "Ensemble statistics across inverse temperatures"},
    {"zeno", qequil::ExperimentKind::kZenoProbe, "Fixed-point distance under a shrinking-time schedule"},
    {"chain2", qequil::ExperimentKind::kChain2Sweep, "Phase-estimation chain against the exact Gibbs chain"},
    {"dm-distance", qequil::ExperimentKind::kRandomDmDistance, "Mean trace distance of random density matrices"},
    {"correlate", qequil::ExperimentKind::kCorrelationSweep, "Two-point correlations and linear response"},
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qequil::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qequil: equilibration experiments for small open quantum systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<int> threads;
  std::string out_dir = ".";

  std::vector<std::pair<CLI::App*, qequil::ExperimentKind>> subs;
  for (const Subcommand& s : kSubcommands) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out-dir", out_dir, "Output directory");
    sub->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "Worker threads (default: QEQUIL_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    subs.emplace_back(sub, s.kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  qequil::ExperimentKind kind{};
  std::string stem;
  for (size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].first->parsed()) {
      kind = subs[i].second;
      stem = kSubcommands[i].name;
    }
  }

  qequil::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? qequil::default_config(kind)
                              : qequil::config_from_json(read_file(config_path), kind);
    if (seed) cfg.seed = *seed;
    if (samples) cfg.samples = *samples;
    cfg.threads = threads ? *threads : qequil::default_threads();
    cfg.validate();
  } catch (const qequil::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  qequil::ExperimentResult result;
  try {
    result = qequil::run_experiment(cfg);
  } catch (const qequil::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qequil::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }

  try {
    std::filesystem::create_directories(out_dir);
    qequil::emit_results(result, out_dir, stem);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << "wrote " << (std::filesystem::path(out_dir) / (stem + ".csv")).string() << " ("
            << result.table.rows.size() << " rows, " << cfg.threads << " threads)\n";
  return kExitOk;
}
