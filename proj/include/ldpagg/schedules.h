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

#ifndef LDPAGG_SCHEDULES_H_
#define LDPAGG_SCHEDULES_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldpagg/common.h"
#include "ldpagg/rng.h"

namespace ldpagg {

// λ(t) = lambda0 / (t + 1)^v.
struct StepsizeSchedule {
  double lambda0 = 1.0;
  double v = 0.5;

  double At(int64_t t) const {
    return lambda0 / std::pow(static_cast<double>(t) + 1.0, v);
  }
};

// Per-agent DP-noise schedule. Each coordinate at iteration t is drawn from
// Lap(ν_t) with ν_t = sigma / (√2 (t + 1)^varsigma), so its variance is
// sigma² / (t + 1)^(2 varsigma).
struct NoiseSchedule {
  double sigma = 0.1;
  double varsigma = 0.0;

  double LaplaceScale(int64_t t) const {
    return sigma /
           (std::sqrt(2.0) * std::pow(static_cast<double>(t) + 1.0, varsigma));
  }
  double Variance(int64_t t) const {
    const double nu = LaplaceScale(t);
    return 2.0 * nu * nu;
  }
};

enum class ConvexityCase { kStronglyConvex, kConvex, kNonconvex };

// "sc", "cvx", "ncvx".
std::string_view ToString(ConvexityCase c);
std::optional<ConvexityCase> ParseConvexityCase(std::string_view s);

// The six decay exponents that drive both the rate and the privacy results.
struct Exponents {
  double v_x = 0.0;
  double v_y = 0.0;
  double v_z = 0.0;
  double varsigma_x = 0.0;
  double varsigma_y = 0.0;
  double varsigma_z = 0.0;
};

struct ScheduleSet {
  StepsizeSchedule lambda_x;
  StepsizeSchedule lambda_y;
  StepsizeSchedule lambda_z;
  // One entry per agent.
  std::vector<NoiseSchedule> noise_x;
  std::vector<NoiseSchedule> noise_y;
  std::vector<NoiseSchedule> noise_z;
  // When false no DP noise is injected (ablations, reduction tests).
  bool noise_enabled = true;

  int num_agents() const { return static_cast<int>(noise_x.size()); }

  // Stepsize exponents plus the per-variable minima of the noise exponents.
  Exponents MinExponents() const;
  // Throws std::invalid_argument on non-positive stepsizes, exponents outside
  // (0, 1), negative noise exponents, non-positive sigmas or list-length
  // mismatches.
  void ValidateStructure() const;
};

// Builds a schedule set with identical noise schedules on `num_agents` agents.
ScheduleSet UniformScheduleSet(const Exponents& e, int num_agents,
                               double lambda0_x, double lambda0_y,
                               double lambda0_z, double sigma_x, double sigma_y,
                               double sigma_z);

// One strict inequality `lhs > rhs`.
struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ConditionReport {
  std::vector<Condition> conditions;
  bool all_pass = false;
  // β for the strongly convex clause, 1 − v_x otherwise; set when all pass.
  std::optional<double> rate_exponent;

  std::vector<std::string> Failures() const;
  std::string ToString() const;
};

// Stepsize ordering 1 > v_x > v_z, 1/2 > v_z > v_y > 0; the per-agent noise
// caps max ς_x < v_x − v_z, max ς_y < v_y, max ς_z < v_z; and the noise-rate
// clause for `convexity`. All comparisons are strict with no tolerance.
ConditionReport CheckConditions(const ScheduleSet& schedules,
                                ConvexityCase convexity);

// Parameter family that drives the rate arbitrarily close to 1/2:
//   strongly convex: v_x = 1/2 + 7δ, ς_x = 1/2 + 3δ;
//   otherwise:       v_x = 1/2 + 5δ, ς_x = 1/2 + δ;
//   always:          v_z = 3δ, v_y = 2δ, ς_y = δ, ς_z = 2δ.
// Throws std::invalid_argument when the result violates any condition.
Exponents RatePreset(ConvexityCase convexity, double delta);

// Inverse-CDF Laplace draws: x = −ν sgn(u) ln(1 − 2|u|), u ~ U(−1/2, 1/2).
// One uniform per coordinate.
double SampleLaplace(RngStream& rng, double nu);
void SampleLaplace(RngStream& rng, double nu, std::span<double> out);
Vector SampleLaplace(RngStream& rng, double nu, int dim);

}  // namespace ldpagg

#endif  // LDPAGG_SCHEDULES_H_
