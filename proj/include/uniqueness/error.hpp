// Copyright 2026 The Uniqueness Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace uniqueness {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dimension argument is out of range (e.g. d < 2 for a joint space).
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible dimensions or outcome counts.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Two POVMs cannot be paired outcome by outcome.
class PairingError : public DimensionMismatch {
 public:
  using DimensionMismatch::DimensionMismatch;
};

/// A value violates one of its type invariants (norm, trace, Hermiticity,
/// positivity, POVM completeness, angle range).
class InvalidValue : public Error {
 public:
  using Error::Error;
};

/// A quantity that is real or normalized in exact arithmetic came out
/// beyond the numerical tolerance.
class NumericalInconsistency : public Error {
 public:
  using Error::Error;
};

/// A closed-form construction broke one of its guaranteed bounds.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

class NotMaximallyEntangled : public Error {
 public:
  using Error::Error;
};

class UnsupportedOutcomeCount : public Error {
 public:
  using Error::Error;
};

}  // namespace uniqueness
