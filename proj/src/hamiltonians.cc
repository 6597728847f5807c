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

#include "qequil/hamiltonians.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "qequil/errors.h"

namespace qequil {

int binomial2(int n) { return n * (n - 1) / 2; }

void LocalHamiltonian::validate() const {
  if (n_qubits < 1 || n_qubits > 30) throw DimensionError("LocalHamiltonian: bad qubit count");
  for (const LocalTerm& term : terms) {
    std::vector<int> sorted = term.support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DimensionError("LocalHamiltonian: repeated qubit in support");
    }
    for (int q : term.support) {
      if (q < 0 || q >= n_qubits) {
        throw DimensionError("LocalHamiltonian: qubit " + std::to_string(q) + " out of range");
      }
    }
    if (term.block.dim() != (1 << term.support.size()) || term.block.dim() != locality_c) {
      throw DimensionError("LocalHamiltonian: block dimension does not match support");
    }
  }
}

LocalTerm sample_local_term(const SamplingSpec& spec, const std::vector<int>& support,
                            Stream& stream) {
  int d = 1 << support.size();
  if (d != spec.locality_c) {
    throw DimensionError("sample_local_term: support of size " + std::to_string(support.size()) +
                         " does not match locality " + std::to_string(spec.locality_c));
  }
  const double a = spec.scale_a;
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = stream.uniform(-a, a);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      double r = stream.uniform(0.0, a);
      double phase = stream.uniform(0.0, 2.0 * M_PI);
      h(i, j) = std::polar(r, phase);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return LocalTerm{support, HermitianOperator(std::move(h))};
}

HermitianOperator assemble(const LocalHamiltonian& h) {
  h.validate();
  const int n = h.n_qubits;
  const int dim = 1 << n;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const LocalTerm& term : h.terms) {
    const int s = static_cast<int>(term.support.size());
    const int d = 1 << s;
    std::vector<int> masks(s);
    int support_mask = 0;
    for (int x = 0; x < s; ++x) {
      masks[x] = 1 << (n - 1 - term.support[x]);
      support_mask |= masks[x];
    }
    auto place = [&](int base, int local) {
      int idx = base;
      for (int x = 0; x < s; ++x) {
        if ((local >> (s - 1 - x)) & 1) idx |= masks[x];
      }
      return idx;
    };
    for (int base = 0; base < dim; ++base) {
      if (base & support_mask) continue;
      for (int bi = 0; bi < d; ++bi) {
        int i = place(base, bi);
        for (int bj = 0; bj < d; ++bj) out(i, place(base, bj)) += term.block.matrix()(bi, bj);
      }
    }
  }
  out = (out + out.adjoint()).eval() * 0.5;
  return HermitianOperator(std::move(out));
}

LocalHamiltonian sample_pair_terms(int n, double a, Stream& stream) {
  if (n < 1) throw DimensionError("sample_pair_terms: n must be >= 1");
  LocalHamiltonian h;
  h.n_qubits = n;
  if (n == 1) {
    h.locality_c = 2;
    h.terms.push_back(sample_local_term({a, 0, 2}, {0}, stream));
    return h;
  }
  h.locality_c = 4;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) h.terms.push_back(sample_local_term({a, 0, 4}, {i, j}, stream));
  }
  return h;
}

LocalHamiltonian sample_system(int n, const SamplingSpec& spec) {
  int expected = n == 1 ? 2 : 4;
  if (spec.locality_c != expected) {
    throw DimensionError("sample_system: locality must be " + std::to_string(expected));
  }
  Stream stream(spec.seed);
  return sample_pair_terms(n, spec.scale_a, stream);
}

LocalHamiltonian sample_bath(int k, double a, Stream& stream) {
  if (k < 1) throw DimensionError("sample_bath: k must be >= 1");
  LocalHamiltonian h;
  h.n_qubits = k;
  h.locality_c = 2;
  for (int q = 0; q < k; ++q) h.terms.push_back(sample_local_term({a, 0, 2}, {q}, stream));
  return h;
}

SystemDraw sample_nondegenerate_system(int n, double a, double min_gap, Stream& stream,
                                       int max_attempts) {
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    LocalHamiltonian h = sample_pair_terms(n, a, stream);
    HermitianOperator dense = assemble(h);
    RealVector e = eigh(dense).values;
    double gap = INFINITY;
    for (Eigen::Index i = 1; i < e.size(); ++i) gap = std::min(gap, e(i) - e(i - 1));
    if (gap >= std::max(min_gap, 1e-8)) return SystemDraw{std::move(h), std::move(dense), attempt};
  }
  throw DegenerateSpectrumError("sample_nondegenerate_system: no draw with level spacing >= " +
                                std::to_string(min_gap) + " in " + std::to_string(max_attempts) +
                                " attempts");
}

double bath_scale(int n, int k) {
  if (k < 1) throw DimensionError("bath_scale: k must be >= 1");
  if (n == 1) return std::sqrt(1.0 / k);
  return std::sqrt(2.0 / k * binomial2(n));
}

double ensemble_system_width(int n) {
  if (n == 1) return std::sqrt(2.0 / 3.0);
  return std::sqrt(4.0 / 3.0 * binomial2(n));
}

double spectral_width(const HermitianOperator& h) {
  return std::sqrt(h.matrix().squaredNorm() / h.dim());
}

double spectral_width(const LocalHamiltonian& h) { return spectral_width(assemble(h)); }

RealVector gibbs_weights(const RealVector& energies, double beta) {
  if (!(beta >= 0)) throw InvariantError("gibbs: beta must be >= 0");
  double e0 = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - e0)).exp();
  return w / w.sum();
}

DensityMatrix gibbs_state(const HermitianOperator& h, double beta) {
  HermitianSpectrum spec = eigh(h);
  return DensityMatrix::from_populations(gibbs_weights(spec.values, beta), spec.vectors);
}

BathGibbs bath_gibbs_product(const LocalHamiltonian& h_b, double beta) {
  h_b.validate();
  std::vector<const LocalTerm*> per_qubit(h_b.n_qubits, nullptr);
  for (const LocalTerm& term : h_b.terms) {
    if (term.support.size() != 1) {
      throw DimensionError("bath_gibbs_product: bath terms must act on a single qubit");
    }
    if (per_qubit[term.support[0]] != nullptr) {
      throw DimensionError("bath_gibbs_product: two terms on qubit " +
                           std::to_string(term.support[0]));
    }
    per_qubit[term.support[0]] = &term;
  }
  ComplexMatrix rho = ComplexMatrix::Ones(1, 1);
  for (int q = 0; q < h_b.n_qubits; ++q) {
    if (per_qubit[q] == nullptr) {
      throw DimensionError("bath_gibbs_product: qubit " + std::to_string(q) + " has no term");
    }
    rho = kron(rho, gibbs_state(per_qubit[q]->block, beta).matrix());
  }
  return BathGibbs{DensityMatrix(std::move(rho)), 2 * h_b.n_qubits};
}

HermitianOperator center_bath_operator(const HermitianOperator& b, const DensityMatrix& rho_b) {
  if (b.dim() != rho_b.dim()) throw DimensionError("center_bath_operator: dimension mismatch");
  double mean = (b.matrix() * rho_b.matrix()).trace().real();
  return HermitianOperator(b.matrix() - mean * ComplexMatrix::Identity(b.dim(), b.dim()));
}

Interaction sample_interaction(int n, int k, const DensityMatrix& rho_b, Stream& stream) {
  HermitianOperator s = assemble(sample_pair_terms(n, 1.0, stream));
  HermitianOperator b = assemble(sample_pair_terms(k, 1.0, stream));
  return Interaction{std::move(s), center_bath_operator(b, rho_b)};
}

ComplexMatrix trotter_product(const std::vector<HermitianOperator>& terms, Complex sigma,
                              int n_steps) {
  if (terms.empty()) throw DimensionError("trotter_product: no terms");
  if (n_steps < 1) throw DimensionError("trotter_product: n_steps must be >= 1");
  const int dim = terms[0].dim();
  ComplexMatrix step = ComplexMatrix::Identity(dim, dim);
  for (const HermitianOperator& h : terms) {
    if (h.dim() != dim) throw DimensionError("trotter_product: terms differ in dimension");
    step = step * matrix_exp_herm(h, sigma / static_cast<double>(n_steps));
  }
  ComplexMatrix out = ComplexMatrix::Identity(dim, dim);
  for (int i = 0; i < n_steps; ++i) out = out * step;
  return out;
}

std::string hamiltonian_to_json(const LocalHamiltonian& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const LocalTerm& term : h.terms) {
    const ComplexMatrix& m = term.block.matrix();
    nlohmann::json block = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      block.push_back(row);
    }
    terms.push_back({{"support", term.support}, {"block", block}});
  }
  nlohmann::json j = {{"n", h.n_qubits}, {"locality_c", h.locality_c}, {"terms", terms}};
  return j.dump();
}

LocalHamiltonian hamiltonian_from_json(const std::string& text) {
  LocalHamiltonian h;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    h.n_qubits = j.at("n").get<int>();
    h.locality_c = j.value("locality_c", 4);
    for (const auto& t : j.at("terms")) {
      std::vector<int> support = t.at("support").get<std::vector<int>>();
      const auto& rows = t.at("block");
      const auto d = static_cast<Eigen::Index>(rows.size());
      ComplexMatrix m(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (rows[r].size() != rows.size()) throw ConfigError("hamiltonian: block is not square");
        for (Eigen::Index c = 0; c < d; ++c) {
          auto e = rows[r][c].get<std::vector<double>>();
          if (e.size() != 2) throw ConfigError("hamiltonian: entries must be [re, im]");
          m(r, c) = Complex(e[0], e[1]);
        }
      }
      h.terms.push_back(LocalTerm{support, HermitianOperator(m)});
    }
    h.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
  return h;
}

}  // namespace qequil
