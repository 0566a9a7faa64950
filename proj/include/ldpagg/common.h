// Copyright 2026 The ldpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPAGG_COMMON_H_
#define LDPAGG_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ldpagg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tolerance for structural residuals (weight-matrix sums, symmetry).
inline constexpr double kStructuralTolerance = 1e-9;

// Raised for malformed run configurations. `path` points at the offending
// key in JSON-pointer form, e.g. "/stepsize/x/v".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Raised when an iterate becomes non-finite.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(int64_t iteration, const std::string& what)
      : std::runtime_error("non-finite state at iteration " +
                           std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  int64_t iteration() const { return iteration_; }

 private:
  int64_t iteration_;
};

}  // namespace ldpagg

#endif  // LDPAGG_COMMON_H_
