// Copyright 2026 The wmwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wmwit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its mathematical domain (e.g. two-level n_th > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A construction would exceed a configured size cap (Hilbert dimension,
/// structure enumeration). The CLI maps this to "computation refused".
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Operator fails the Hermitian / unit-trace / positive checks.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// A projection such as b^dag rho b has vanishing norm.
class DegenerateProjectionError : public Error {
 public:
  using Error::Error;
};

/// Requested evaluation is not available for this statistics kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Correlator cannot be written as <B^dag B> and so has no photocount form.
class NotMeasurableError : public Error {
 public:
  using Error::Error;
};

class NonUnitaryError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Count set lacks observables required by an evaluator; what() lists them.
class MissingCountsError : public Error {
 public:
  using Error::Error;
};

/// Input file does not match its schema; what() names the line or field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace wmwit
