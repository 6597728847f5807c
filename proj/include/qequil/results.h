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

#ifndef QEQUIL_RESULTS_H_
#define QEQUIL_RESULTS_H_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qequil {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Per-sample rows with a named header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> numeric_column(const std::string& name) const;
};

struct Aggregate {
  std::int64_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stderr_mean = 0.0;  // sample standard deviation / sqrt(count)
};

Aggregate aggregate(const std::vector<double>& values);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
};

/// Bins [e_i, e_{i+1}); the last bin is closed on the right.
Histogram histogram(const std::vector<double>& values, const std::vector<double>& edges);
std::vector<double> uniform_edges(double lo, double hi, int bins);

/// Statistics for the subset of rows whose `keys` columns equal the given values.
struct Group {
  std::map<std::string, double> keys;
  std::map<std::string, Aggregate> aggregates;
  std::map<std::string, Histogram> histograms;
  std::map<std::string, double> scalars;
};

struct ExperimentResult {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_json;  // echo of the effective configuration
  Table table;
  std::vector<Group> groups;
  std::map<std::string, double> scalars;
  std::vector<std::string> notes;
  std::map<std::string, std::string> attachments;  // extra files keyed by suffix
};

/// Shortest round-trip decimal form.
std::string format_double(double v);

std::string to_csv(const Table& table);
std::string summary_json(const ExperimentResult& result);

/// Writes <out_dir>/<stem>.csv, <out_dir>/<stem>.summary.json and one
/// <out_dir>/<stem>.<suffix> per attachment. Throws
/// qequil::Error naming the path on I/O failure.
void emit_results(const ExperimentResult& result, const std::string& out_dir,
                  const std::string& stem);

}  // namespace qequil

#endif  // QEQUIL_RESULTS_H_
