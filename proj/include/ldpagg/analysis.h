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

#ifndef LDPAGG_ANALYSIS_H_
#define LDPAGG_ANALYSIS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldpagg/algorithm.h"
#include "ldpagg/problems.h"

namespace ldpagg {

// Every t below `dense_below`, then about `per_decade` log-spaced points per
// decade, always ending with `horizon`. Strictly increasing.
std::vector<int64_t> SamplingGrid(int64_t horizon, int per_decade = 30,
                                  int64_t dense_below = 100);

// Error metrics on the stacked own blocks col(x_1, ..., x_m). Empty when the
// problem certifies no optimum.
std::optional<double> ErrToOptSq(const Problem& problem, const Vector& x);
std::optional<double> ObjectiveGap(const Problem& problem, const Vector& x);
double GradNormSq(const Problem& problem, const Vector& x);

// Σ_l ‖x_l − x̄‖² over the agents' stacked estimates, and the same dispersion
// for the latest tracker increments.
double ConsensusX(const std::vector<AgentState>& states);
double ConsensusY(const std::vector<AgentState>& states);
double ConsensusZ(const std::vector<AgentState>& states);

// Sampled metrics of one run. Columns are fixed at construction; a column a
// problem cannot supply is never created.
class MetricTable {
 public:
  MetricTable() = default;
  explicit MetricTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<int64_t>& t() const { return t_; }
  size_t size() const { return t_.size(); }

  // Appends a row; `values` follows the column order.
  void Append(int64_t t, std::vector<double> values);
  // Index of a column, or -1.
  int ColumnIndex(const std::string& name) const;
  bool HasColumn(const std::string& name) const { return ColumnIndex(name) >= 0; }
  std::vector<double> Column(const std::string& name) const;
  const std::vector<double>& Row(size_t k) const { return rows_[k]; }

  // First t at which a non-finite value appeared; rows stop there.
  std::optional<int64_t> truncated_at;

  // Header "t,<columns>", then one row per sample; values with 17 significant
  // digits.
  void WriteCsv(std::ostream& out) const;
  // Throws std::runtime_error on malformed input.
  static MetricTable ReadCsv(std::istream& in);

 private:
  std::vector<std::string> columns_;
  std::vector<int64_t> t_;
  std::vector<std::vector<double>> rows_;
};

// Element-wise mean over runs that share one sampling grid. Throws
// std::invalid_argument when the grids differ.
MetricTable MeanTable(const std::vector<MetricTable>& runs);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log10(value) at log10(t) = 0
  double r2 = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int points = 0;
  int seeds = 0;
  // 95% confidence interval on the slope.
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Least squares of log10(value) on log10(t) over t ∈ [t_lo, t_hi]. Throws
// std::invalid_argument with fewer than 5 points or with non-finite or
// non-positive values inside the window.
SlopeFit FitRate(const std::vector<int64_t>& t,
                 const std::vector<double>& values, double t_lo, double t_hi,
                 int seeds = 1);

}  // namespace ldpagg

#endif  // LDPAGG_ANALYSIS_H_
