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

#include "ldpagg/schedules.h"

#include <cmath>

#include <gtest/gtest.h>

namespace ldpagg {
namespace {

TEST(Schedules, StronglyConvexPreset) {
  const Exponents e = RatePreset(ConvexityCase::kStronglyConvex, 0.01);
  EXPECT_DOUBLE_EQ(e.v_x, 0.57);
  EXPECT_DOUBLE_EQ(e.v_y, 0.02);
  EXPECT_DOUBLE_EQ(e.v_z, 0.03);
  EXPECT_DOUBLE_EQ(e.varsigma_x, 0.53);
  EXPECT_DOUBLE_EQ(e.varsigma_y, 0.01);
  EXPECT_DOUBLE_EQ(e.varsigma_z, 0.02);
  const ConditionReport r = CheckConditions(
      UniformScheduleSet(e, 5, 1, 1, 1, 0.1, 0.1, 0.1), ConvexityCase::kStronglyConvex);
  ASSERT_TRUE(r.all_pass) << r.ToString();
  EXPECT_NEAR(*r.rate_exponent, 0.49, 1e-12);
}

TEST(Schedules, ConvexAndNonconvexPresets) {
  for (auto c : {ConvexityCase::kConvex, ConvexityCase::kNonconvex}) {
    const Exponents e = RatePreset(c, 0.01);
    EXPECT_DOUBLE_EQ(e.v_x, 0.55);
    EXPECT_DOUBLE_EQ(e.varsigma_x, 0.51);
    const ConditionReport r =
        CheckConditions(UniformScheduleSet(e, 3, 1, 1, 1, 1, 1, 1), c);
    ASSERT_TRUE(r.all_pass) << r.ToString();
    EXPECT_NEAR(*r.rate_exponent, 0.45, 1e-12);
  }
}

TEST(Schedules, PresetRejectsOversizedDelta) {
  EXPECT_THROW(RatePreset(ConvexityCase::kStronglyConvex, 0.2), std::invalid_argument);
  EXPECT_THROW(RatePreset(ConvexityCase::kConvex, 0.0), std::invalid_argument);
}

TEST(Schedules, ConditionFailuresAreNamed) {
  Exponents e = RatePreset(ConvexityCase::kStronglyConvex, 0.01);
  e.varsigma_x = 0.2;  // below v_x/2
  const ConditionReport r = CheckConditions(
      UniformScheduleSet(e, 2, 1, 1, 1, 1, 1, 1), ConvexityCase::kStronglyConvex);
  EXPECT_FALSE(r.all_pass);
  EXPECT_FALSE(r.rate_exponent.has_value());
  ASSERT_EQ(r.Failures().size(), 1u);
  EXPECT_NE(r.Failures()[0].find("v_x/2"), std::string::npos);
}

TEST(Schedules, StructureValidation) {
  ScheduleSet s = UniformScheduleSet(RatePreset(ConvexityCase::kConvex, 0.01), 3,
                                     1, 1, 1, 1, 1, 1);
  EXPECT_NO_THROW(s.ValidateStructure());
  s.noise_y.pop_back();
  EXPECT_THROW(s.ValidateStructure(), std::invalid_argument);
  s = UniformScheduleSet(RatePreset(ConvexityCase::kConvex, 0.01), 3, 1, 1, 1, 1, 1, 1);
  s.noise_x[1].sigma = 0.0;
  EXPECT_THROW(s.ValidateStructure(), std::invalid_argument);
  s.noise_x[1].sigma = 1.0;
  s.lambda_z.v = 1.2;
  EXPECT_THROW(s.ValidateStructure(), std::invalid_argument);
}

TEST(Schedules, StepAndScaleDecay) {
  const StepsizeSchedule step{2.0, 0.5};
  EXPECT_DOUBLE_EQ(step.At(0), 2.0);
  EXPECT_DOUBLE_EQ(step.At(3), 1.0);
  const NoiseSchedule noise{1.0, 0.5};
  EXPECT_DOUBLE_EQ(noise.LaplaceScale(0), 1.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(noise.Variance(3), 0.25);
  const NoiseSchedule constant{0.4, 0.0};
  EXPECT_DOUBLE_EQ(constant.Variance(0), constant.Variance(1000));
}

TEST(Schedules, LaplaceMoments) {
  RngStream rng(42);
  const double nu = 0.7;
  const int n = 1'000'000;
  double s1 = 0, s2 = 0, s4 = 0, abs_sum = 0;
  for (int k = 0; k < n; ++k) {
    const double v = SampleLaplace(rng, nu);
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
    abs_sum += std::abs(v);
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(var, 2 * nu * nu, 0.05 * 2 * nu * nu);
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(2.0) * nu / std::sqrt(n));
  EXPECT_NEAR(abs_sum / n, nu, 0.01 * nu);
  EXPECT_NEAR((s4 / n) / (var * var), 6.0, 0.3);
}

TEST(Schedules, LaplaceVectorMatchesScalarStream) {
  RngStream a(9), b(9);
  const Vector v = SampleLaplace(a, 0.3, 7);
  for (int k = 0; k < 7; ++k) EXPECT_EQ(v[k], SampleLaplace(b, 0.3));
}

}  // namespace
}  // namespace ldpagg
