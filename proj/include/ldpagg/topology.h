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

#ifndef LDPAGG_TOPOLOGY_H_
#define LDPAGG_TOPOLOGY_H_

#include <optional>
#include <string>
#include <vector>

#include "ldpagg/common.h"

namespace ldpagg {

// One structural condition on a weight matrix and its measured residual.
struct ValidationItem {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool valid = false;
  // Filled when the matrix is valid.
  std::optional<double> rho2_abs;
  std::optional<double> w_bar;
  std::optional<double> contraction_norm;
  // ‖I + W − 11ᵀ/m‖ − (1 − |ρ₂|). Informational only: for symmetric W the
  // norm is max(|1 + ρ₂|, |1 + λ_min|) >= 1 − |ρ₂|, so this is never < 0.
  std::optional<double> spectral_bound_gap;

  std::string ToString() const;
};

// Checks the weight-matrix conditions: square and symmetric, zero row and
// column sums, nonnegative off-diagonal entries, w_ii = −Σ_j w_ij with
// w_ii < 0 when m >= 2, and ‖I + W − 11ᵀ/m‖₂ < 1.
ValidationReport ValidateWeights(const Matrix& weights);

// Communication graph with its Laplacian-like weight matrix W
// (w_ij > 0 on edges, w_ii = −Σ_j w_ij). Immutable after construction.
class NetworkTopology {
 public:
  // m agents on a cycle with edge weight w. Requires m >= 2, 0 < w < 1/2.
  static NetworkTopology Ring(int m, double w);
  // Single agent, W = [0]. ρ₂ is 1 by convention.
  static NetworkTopology Trivial();
  // Throws std::invalid_argument carrying the report when validation fails.
  static NetworkTopology FromMatrix(const Matrix& weights);

  int num_agents() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double weight(int i, int j) const { return weights_(i, j); }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  double rho2_abs() const { return rho2_abs_; }
  double w_bar() const { return w_bar_; }
  double contraction_norm() const { return contraction_norm_; }
  // Eigenvalues of W in ascending order.
  const Vector& spectrum() const { return spectrum_; }

 private:
  NetworkTopology() = default;

  Matrix weights_;
  std::vector<std::vector<int>> neighbors_;
  Vector spectrum_;
  double rho2_abs_ = 1.0;
  double w_bar_ = 0.0;
  double contraction_norm_ = 0.0;
};

}  // namespace ldpagg

#endif  // LDPAGG_TOPOLOGY_H_
