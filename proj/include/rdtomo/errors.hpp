// Copyright 2026 The rdtomo Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdtomo {

/// Input outside the domain of a closed-form model (non-finite detuning, d out of range, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Covariance matrix violating the uncertainty relation [p, q] = 2i.
class InadmissibleState : public std::invalid_argument {
  public:
    InadmissibleState(const std::string& what, double symplectic_eigenvalue)
        : std::invalid_argument(what), symplectic_eigenvalue_(symplectic_eigenvalue) {}

    double symplectic_eigenvalue() const { return symplectic_eigenvalue_; }

  private:
    double symplectic_eigenvalue_;
};

class CalibrationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when the fitted moments are physically incompatible with the measurement model.
class ModelMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

}  // namespace rdtomo
