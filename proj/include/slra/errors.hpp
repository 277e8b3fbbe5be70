// Copyright 2026 The slra Authors.
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

#ifndef SLRA_ERRORS_HPP
#define SLRA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slra {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of the arguments do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (bad weights, non-injective structure, bad file).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix of the inner least-norm problem is (numerically) singular.
class SingularGamma : public Error {
 public:
  using Error::Error;
};

/// The number of structure parameters is smaller than the number of
/// constraints, so the Gram matrix can never be invertible.
class NecessaryConditionError : public InputError {
 public:
  using InputError::InputError;
};

/// An operation was called on data that does not satisfy its contract,
/// e.g. the block-Toeplitz gradient on element-wise weights.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The dense reference implementation refused an oversized problem or an
/// infeasible constraint.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace slra

#endif  // SLRA_ERRORS_HPP
