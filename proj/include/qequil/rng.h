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

#ifndef QEQUIL_RNG_H_
#define QEQUIL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace qequil {

/// Counter-based generator: output i is splitmix64(key + i * golden).
///
/// Streams are addressed by a seed and a path of labels, so the draw for
/// sample j never depends on how many draws other samples made. Satisfies
/// UniformRandomBitGenerator, so std distributions work on it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels = {});

  /// Independent stream keyed by this stream's key and `label`.
  Stream child(std::uint64_t label) const;

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double exponential();

  std::uint64_t key() const { return key_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  Stream(std::uint64_t key, bool) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qequil

#endif  // QEQUIL_RNG_H_
