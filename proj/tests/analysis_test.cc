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

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.h"

namespace ldpagg {
namespace {

TEST(SamplingGrid, DenseThenLogSpaced) {
  const std::vector<int64_t> g = SamplingGrid(100000);
  for (int64_t t = 0; t < 100; ++t) ASSERT_EQ(g[t], t);
  EXPECT_EQ(g[100], 100);
  EXPECT_EQ(g.back(), 100000);
  for (size_t k = 1; k < g.size(); ++k) ASSERT_LT(g[k - 1], g[k]);
  // 30 points per decade over three decades plus the endpoint.
  EXPECT_EQ(g.size(), 100u + 91u);
  const std::vector<int64_t> odd = SamplingGrid(1234);
  EXPECT_EQ(odd.back(), 1234);
  EXPECT_EQ(SamplingGrid(0), std::vector<int64_t>{0});
  EXPECT_EQ(SamplingGrid(50).size(), 51u);
}

TEST(FitRate, ExactPowerLaw) {
  std::vector<int64_t> t;
  std::vector<double> v;
  for (int64_t s : SamplingGrid(100000)) {
    if (s == 0) continue;
    t.push_back(s);
    v.push_back(3.0 * std::pow(static_cast<double>(s), -0.5));
  }
  const SlopeFit fit = FitRate(t, v, 1000, 100000, 10);
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log10(3.0), 1e-10);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_EQ(fit.points, 61);
  EXPECT_EQ(fit.seeds, 10);
  EXPECT_NEAR(fit.ci_low, -0.5, 1e-9);
  EXPECT_NEAR(fit.ci_high, -0.5, 1e-9);
}

TEST(FitRate, ConstantSeriesHasZeroSlope) {
  std::vector<int64_t> t{10, 20, 40, 80, 160, 320};
  std::vector<double> v(t.size(), 0.25);
  const SlopeFit fit = FitRate(t, v, 1, 1000);
  EXPECT_EQ(fit.slope, 0.0);
  EXPECT_EQ(fit.r2, 1.0);
}

TEST(FitRate, MatchesScipyRegression) {
  const nlohmann::json want = testing::LoadFixture("slope_fit.json");
  std::set<int64_t> ts;
  for (int k = 0; k <= 60; ++k) ts.insert(std::llround(std::pow(10.0, 1.0 + k / 20.0)));
  std::vector<int64_t> t(ts.begin(), ts.end());
  std::vector<double> v;
  for (int64_t s : t) {
    const double d = static_cast<double>(s);
    v.push_back(std::pow(d, -0.6) * (1.0 + 0.3 * std::sin(d)));
  }
  const SlopeFit fit = FitRate(t, v, 30, 5000);
  EXPECT_EQ(fit.points, want["points"].get<int>());
  EXPECT_NEAR(fit.slope, want["slope"].get<double>(), 1e-12);
  EXPECT_NEAR(fit.intercept, want["intercept"].get<double>(), 1e-12);
  EXPECT_NEAR(fit.r2, want["r2"].get<double>(), 1e-12);
  EXPECT_NEAR(fit.ci_low, want["ci_low"].get<double>(), 1e-10);
  EXPECT_NEAR(fit.ci_high, want["ci_high"].get<double>(), 1e-10);
}

TEST(FitRate, NoiseFloorFlattensSlope) {
  std::vector<int64_t> t;
  std::vector<double> clean, floored;
  for (int64_t s : SamplingGrid(100000)) {
    if (s == 0) continue;
    t.push_back(s);
    clean.push_back(std::pow(static_cast<double>(s), -0.5));
    floored.push_back(clean.back() + 1e-2);
  }
  EXPECT_GT(FitRate(t, floored, 1000, 100000).slope, FitRate(t, clean, 1000, 100000).slope + 0.2);
}

TEST(FitRate, RejectsThinOrInvalidWindows) {
  std::vector<int64_t> t{1, 2, 3, 4, 5, 6};
  std::vector<double> v{1, 0.5, 0.3, 0.25, 0.2, 0.15};
  EXPECT_THROW(FitRate(t, v, 2, 5), std::invalid_argument);
  v[3] = 0.0;
  EXPECT_THROW(FitRate(t, v, 1, 6), std::invalid_argument);
  v[3] = NAN;
  EXPECT_THROW(FitRate(t, v, 1, 6), std::invalid_argument);
}

TEST(MetricTable, CsvRoundTripIsExact) {
  MetricTable table({"a", "b"});
  table.Append(0, {1.0 / 3.0, 1e-300});
  table.Append(7, {-2.5e17, std::nextafter(1.0, 2.0)});
  std::stringstream buf;
  table.WriteCsv(buf);
  EXPECT_EQ(buf.str().substr(0, 6), "t,a,b\n");
  const MetricTable back = MetricTable::ReadCsv(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.columns(), table.columns());
  EXPECT_EQ(back.t(), table.t());
  EXPECT_EQ(back.Row(0), table.Row(0));
  EXPECT_EQ(back.Row(1), table.Row(1));
  std::stringstream bad("t,a\n1,2,3\n");
  EXPECT_THROW(MetricTable::ReadCsv(bad), std::runtime_error);
}

TEST(MetricTable, MeanAcrossRuns) {
  MetricTable a({"v"}), b({"v"});
  a.Append(1, {1.0});
  a.Append(2, {3.0});
  b.Append(1, {3.0});
  b.Append(2, {5.0});
  const MetricTable mean = MeanTable({a, b});
  EXPECT_EQ(mean.Column("v"), (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(mean.ColumnIndex("missing"), -1);
}

TEST(Metrics, GapAndGradientVanishAtOptimum) {
  const QuadraticProblem p(testing::ReferenceQuadratic());
  const Vector& x = *p.optimum();
  EXPECT_NEAR(*ObjectiveGap(p, x), 0.0, 1e-12);
  EXPECT_LT(GradNormSq(p, x), 1e-16);
  EXPECT_EQ(*ErrToOptSq(p, x), 0.0);
  const Vector off = x + Vector::Constant(x.size(), 0.1);
  EXPECT_GT(*ObjectiveGap(p, off), 0.0);
  EXPECT_NEAR(*ErrToOptSq(p, off), 0.01 * x.size(), 1e-12);
}

}  // namespace
}  // namespace ldpagg
