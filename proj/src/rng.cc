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

#include "qequil/rng.h"

#include <random>

namespace qequil {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t combine(std::uint64_t key, std::uint64_t label) {
  return splitmix64(key ^ splitmix64(label + kGolden));
}
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels)
    : key_(splitmix64(seed)) {
  for (std::uint64_t label : labels) key_ = combine(key_, label);
}

Stream Stream::child(std::uint64_t label) const { return Stream(combine(key_, label), true); }

Stream::result_type Stream::operator()() {
  return splitmix64(key_ + (counter_++) * kGolden);
}

double Stream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Stream::normal() {
  std::normal_distribution<double> dist;
  return dist(*this);
}

double Stream::exponential() {
  std::exponential_distribution<double> dist;
  return dist(*this);
}

}  // namespace qequil
