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

#include "qequil/results.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qequil/errors.h"

namespace qequil {

int Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  int c = column(name);
  if (c < 0) throw Error("Table: no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (const double* d = std::get_if<double>(&row[c])) {
      out.push_back(*d);
    } else if (const std::int64_t* i = std::get_if<std::int64_t>(&row[c])) {
      out.push_back(static_cast<double>(*i));
    } else {
      throw Error("Table: column '" + name + "' is not numeric");
    }
  }
  return out;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / values.size();
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  size_t mid = sorted.size() / 2;
  a.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stderr_mean = std::sqrt(ss / (values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
  }
  return a;
}

Histogram histogram(const std::vector<double>& values, const std::vector<double>& edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw Error("histogram: need at least two ascending edges");
  }
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  for (double v : values) {
    if (v < edges.front()) {
      ++h.underflow;
    } else if (v > edges.back()) {
      ++h.overflow;
    } else {
      size_t bin = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
      bin = std::min(bin, edges.size() - 1);
      ++h.counts[bin - 1];
    }
  }
  return h;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
  return e;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json to_json(const Aggregate& a) {
  return {{"count", a.count}, {"mean", number(a.mean)}, {"median", number(a.median)},
          {"stderr", number(a.stderr_mean)}};
}

nlohmann::json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"underflow", h.underflow},
          {"overflow", h.overflow}};
}

nlohmann::json to_json(const std::map<std::string, double>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : m) j[k] = number(v);
  return j;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["kind"] = result.kind;
  j["seed"] = result.seed;
  j["config"] = result.config_json.empty() ? nlohmann::json::object()
                                           : nlohmann::json::parse(result.config_json);
  j["count"] = result.table.rows.size();
  j["columns"] = result.table.columns;
  j["scalars"] = to_json(result.scalars);
  j["groups"] = nlohmann::json::array();
  for (const Group& g : result.groups) {
    nlohmann::json jg;
    jg["keys"] = to_json(g.keys);
    jg["aggregates"] = nlohmann::json::object();
    for (const auto& [k, a] : g.aggregates) jg["aggregates"][k] = to_json(a);
    jg["histograms"] = nlohmann::json::object();
    for (const auto& [k, h] : g.histograms) jg["histograms"][k] = to_json(h);
    jg["scalars"] = to_json(g.scalars);
    j["groups"].push_back(std::move(jg));
  }
  j["notes"] = result.notes;
  return j.dump(2) + "\n";
}

void emit_results(const ExperimentResult& result, const std::string& out_dir,
                  const std::string& stem) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw Error("write failed for '" + path.string() + "'");
  };
  write(fs::path(out_dir) / (stem + ".csv"), to_csv(result.table));
  write(fs::path(out_dir) / (stem + ".summary.json"), summary_json(result));
  for (const auto& [suffix, text] : result.attachments) {
    write(fs::path(out_dir) / (stem + "." + suffix), text);
  }
}

}  // namespace qequil
