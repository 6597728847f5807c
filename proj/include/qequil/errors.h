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

#ifndef QEQUIL_ERRORS_H_
#define QEQUIL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace qequil {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match or a factorization is impossible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A validated type was constructed from data that violates its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// An eigensolver or iteration did not reach the requested accuracy.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// More than one eigenvalue sits at 1, so the fixed point is not unique.
class AmbiguousFixedPointError : public Error {
 public:
  using Error::Error;
};

/// Two energy levels coincide where distinct levels are required.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity left its admissible range.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qequil

#endif  // QEQUIL_ERRORS_H_
