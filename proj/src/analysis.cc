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

#include "ldpagg/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace ldpagg {

std::vector<int64_t> SamplingGrid(int64_t horizon, int per_decade,
                                  int64_t dense_below) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (per_decade < 1) throw std::invalid_argument("per_decade must be >= 1");
  std::vector<int64_t> grid;
  for (int64_t t = 0; t <= std::min(horizon, dense_below - 1); ++t) {
    grid.push_back(t);
  }
  if (horizon >= dense_below) {
    const double start = std::log10(static_cast<double>(std::max<int64_t>(dense_below, 1)));
    for (int k = 0;; ++k) {
      const double e = start + static_cast<double>(k) / per_decade;
      const auto t = static_cast<int64_t>(std::llround(std::pow(10.0, e)));
      if (t > horizon) break;
      if (grid.empty() || t > grid.back()) grid.push_back(t);
    }
    if (grid.back() != horizon) grid.push_back(horizon);
  }
  return grid;
}

std::optional<double> ErrToOptSq(const Problem& problem, const Vector& x) {
  if (!problem.optimum()) return std::nullopt;
  return (x - *problem.optimum()).squaredNorm();
}

std::optional<double> ObjectiveGap(const Problem& problem, const Vector& x) {
  const std::optional<double> best = problem.optimal_value();
  if (!best) return std::nullopt;
  return problem.Objective(x) - *best;
}

double GradNormSq(const Problem& problem, const Vector& x) {
  return problem.Gradient(x).squaredNorm();
}

double ConsensusX(const std::vector<AgentState>& states) {
  std::vector<Vector> v;
  v.reserve(states.size());
  for (const auto& s : states) v.push_back(s.x);
  return Dispersion(v);
}

double ConsensusY(const std::vector<AgentState>& states) {
  std::vector<Vector> v;
  v.reserve(states.size());
  for (const auto& s : states) v.push_back(s.last_dy);
  return Dispersion(v);
}

double ConsensusZ(const std::vector<AgentState>& states) {
  std::vector<Vector> v;
  v.reserve(states.size());
  for (const auto& s : states) v.push_back(s.last_dz);
  return Dispersion(v);
}

// ---------------------------------------------------------------------------

MetricTable::MetricTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void MetricTable::Append(int64_t t, std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw std::invalid_argument("row width does not match the columns");
  }
  if (!t_.empty() && t <= t_.back()) {
    throw std::invalid_argument("sample times must increase");
  }
  t_.push_back(t);
  rows_.push_back(std::move(values));
}

int MetricTable::ColumnIndex(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  return it == columns_.end() ? -1 : static_cast<int>(it - columns_.begin());
}

std::vector<double> MetricTable::Column(const std::string& name) const {
  const int k = ColumnIndex(name);
  if (k < 0) throw std::invalid_argument("no column named " + name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[k]);
  return out;
}

void MetricTable::WriteCsv(std::ostream& out) const {
  out << "t";
  for (const auto& c : columns_) out << ',' << c;
  out << '\n';
  char buf[40];
  for (size_t k = 0; k < t_.size(); ++k) {
    out << t_[k];
    for (double v : rows_[k]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

MetricTable MetricTable::ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "t") {
    throw std::runtime_error("CSV must start with a t column");
  }
  MetricTable table(std::vector<std::string>(header.begin() + 1, header.end()));
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) +
                               " has the wrong number of fields");
    }
    std::vector<double> values;
    for (size_t k = 1; k < cells.size(); ++k) {
      char* end = nullptr;
      values.push_back(std::strtod(cells[k].c_str(), &end));
      if (end == cells[k].c_str()) {
        throw std::runtime_error("bad number on CSV line " +
                                 std::to_string(line_no));
      }
    }
    table.Append(std::stoll(cells[0]), std::move(values));
  }
  return table;
}

MetricTable MeanTable(const std::vector<MetricTable>& runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to average");
  const MetricTable& first = runs.front();
  for (const auto& r : runs) {
    if (r.columns() != first.columns() || r.t() != first.t()) {
      throw std::invalid_argument("runs do not share one sampling grid");
    }
  }
  MetricTable mean(first.columns());
  const double inv = 1.0 / static_cast<double>(runs.size());
  for (size_t k = 0; k < first.size(); ++k) {
    std::vector<double> row(first.columns().size(), 0.0);
    for (const auto& r : runs) {
      for (size_t c = 0; c < row.size(); ++c) row[c] += r.Row(k)[c];
    }
    for (double& v : row) v *= inv;
    mean.Append(first.t()[k], std::move(row));
  }
  return mean;
}

SlopeFit FitRate(const std::vector<int64_t>& t,
                 const std::vector<double>& values, double t_lo, double t_hi,
                 int seeds) {
  if (t.size() != values.size()) {
    throw std::invalid_argument("t and values differ in length");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (size_t k = 0; k < t.size(); ++k) {
    const double tk = static_cast<double>(t[k]);
    if (tk < t_lo || tk > t_hi) continue;
    if (!std::isfinite(values[k]) || !(values[k] > 0.0)) {
      throw std::invalid_argument("non-finite or non-positive value at t = " +
                                  std::to_string(t[k]));
    }
    if (tk <= 0.0) continue;
    lx.push_back(std::log10(tk));
    ly.push_back(std::log10(values[k]));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 5) throw std::invalid_argument("fewer than 5 points in the window");

  double mx = 0.0;
  double my = 0.0;
  for (int k = 0; k < n; ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("window spans a single t");

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = n;
  fit.seeds = seeds;
  const double se = std::sqrt(sse / (n - 2) / sxx);
  const boost::math::students_t dist(n - 2);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.slope - q * se;
  fit.ci_high = fit.slope + q * se;
  return fit;
}

}  // namespace ldpagg
