// Copyright 2026 The qstpinn Authors
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

namespace qst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible matrix/tensor shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A requested size exceeds a configured limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be positive semidefinite has a clearly negative eigenvalue.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

/// A matrix fails the density-matrix invariants.
class NotAStateError : public Error {
 public:
  using Error::Error;
};

/// A Cholesky factor (or its Gram matrix) is numerically zero.
class DegenerateFactorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

}  // namespace qst
