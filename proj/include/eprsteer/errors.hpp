// Copyright 2026 The eprsteer Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace eprsteer {

/// Bad argument to an operation (range, index, arity).
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Squeezer parameters that describe no physical single-mode state.
class UnphysicalModel : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Base for failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Homodyne conditioning on a quadrature with (near) zero variance.
class SingularConditioning : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Singular block in a Schur complement.
class NumericalDegeneracy : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Steerable but PPT-separable; only reachable through a numerical fault.
class HierarchyViolation : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Sample data whose conditioning variance vanishes.
class DegenerateData : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Parameter fit ended with a residual above the acceptance threshold.
class FitFailed : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incomplete dataset / parameter file.
class InvalidInput : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class OutputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace eprsteer
