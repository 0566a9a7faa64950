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

// Privacy accounting for the Laplace-obscured broadcasts.
//
// Sensitivities follow the dominating recursion (evaluated y, then z, then x;
// all Δ start at 0):
//
//   Δy' = (1−w̄)Δy + L_l√r λ_y Δx + 2 d_l λ_y/(t+1)
//   Δz' = (1−w̄)Δz + √r L̄_h λ_z Δx + (√r L̄_h λ_z/λ_y)(Δy'+Δy)
//         + 2√r L_h λ_z/(t+1)
//   Δx' = (1−w̄ + √n L̄_h λ_x + √n L̄_l d_z λ_x/λ_z)Δx
//         + (√n L̄_h λ_x/λ_y)(Δy'+Δy) + (√n L_l λ_x/λ_z)(Δz'+Δz)
//         + 2√n L_h λ_x/(t+1) + 2√n d_z L_l λ_x/(λ_z (t+1))
//
// and the budget after T rounds is Σ_{t=1}^{T} (Δx/νx + Δy/νy + Δz/νz) with ν
// the Laplace scale of each round.

#ifndef LDPAGG_PRIVACY_H_
#define LDPAGG_PRIVACY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpagg/schedules.h"

namespace ldpagg {

// Oracle constants the accountant assumes: Lipschitz constants of l, h and
// their gradients, the bound d_l on ‖l‖₁ over Ω and the bound d_z on ‖z‖₂.
struct OracleConstants {
  double lip_l = 1.0;       // L_l
  double lip_h = 1.0;       // L_h
  double lip_grad_l = 1.0;  // L̄_l
  double lip_grad_h = 1.0;  // L̄_h
  double bound_l = 1.0;     // d_l
  double bound_z = 1.0;     // d_z
};

struct SensitivityParams {
  OracleConstants oracle;
  double w_bar = 0.5;
  int block_dim = 1;      // n_i
  int aggregate_dim = 1;  // r
  StepsizeSchedule lambda_x;
  StepsizeSchedule lambda_y;
  StepsizeSchedule lambda_z;

  // Throws std::invalid_argument on negative constants, w̄ ∉ (0, 1] or
  // non-positive dimensions.
  void Validate() const;
};

SensitivityParams MakeSensitivityParams(const OracleConstants& oracle,
                                        double w_bar, int block_dim,
                                        int aggregate_dim,
                                        const ScheduleSet& schedules);

struct SensitivityTriple {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Δ^{t+1} from Δ^t.
SensitivityTriple SensitivityStep(const SensitivityTriple& delta, int64_t t,
                                  const SensitivityParams& params);

// Multipliers on each Δ's own previous value in round t.
struct ContractionCoefficients {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool contracting() const { return x < 1.0 && y < 1.0 && z < 1.0; }
};

ContractionCoefficients Contraction(int64_t t, const SensitivityParams& params);

struct SensitivityTrajectory {
  std::vector<SensitivityTriple> delta;  // t = 0..T
  // First round whose coefficients are all < 1 (none within the horizon when
  // empty), and the first round that violates it.
  std::optional<int64_t> first_contracting;
  std::optional<int64_t> first_violation;
};

SensitivityTrajectory RunSensitivityRecursion(const SensitivityParams& params,
                                              int64_t horizon);

// Constants of the power-law envelopes Δy ≤ C_y/(t+1)^{1+v_y},
// Δx ≤ C_x/(t+1)^{1+v_x−v_z}, Δz ≤ C_z/(t+1)^{1+v_z}.
struct ClosedFormConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
};

// Requires 1 > v_x > v_z > v_y > 0.
ClosedFormConstants ComputeClosedFormConstants(const SensitivityParams& params);

// Decay exponents of the envelopes: {1+v_x−v_z, 1+v_y, 1+v_z}.
SensitivityTriple EnvelopeExponents(const SensitivityParams& params);

enum class DeltaSource { kRecursion, kClosedForm };

std::string_view ToString(DeltaSource s);
std::optional<DeltaSource> ParseDeltaSource(std::string_view s);

struct AgentNoise {
  NoiseSchedule x;
  NoiseSchedule y;
  NoiseSchedule z;
};

AgentNoise NoiseOf(const ScheduleSet& schedules, int agent);

struct AgentBudget {
  // Budget components over rounds 1..T (or the infinite-horizon bound when
  // the horizon is unbounded).
  double eps_x = 0.0;
  double eps_y = 0.0;
  double eps_z = 0.0;
  // Closed-form bound for T → ∞; +∞ when an exponent gap is not positive.
  double bound_inf_x = 0.0;
  double bound_inf_y = 0.0;
  double bound_inf_z = 0.0;

  double total() const { return eps_x + eps_y + eps_z; }
  double bound_inf() const { return bound_inf_x + bound_inf_y + bound_inf_z; }
};

// `horizon` empty means T = ∞, which only the closed form can evaluate; the
// recursion source then falls back to the closed-form bound.
AgentBudget ComputeBudget(const SensitivityParams& params,
                          const AgentNoise& noise,
                          std::optional<int64_t> horizon, DeltaSource source);

// ε_i(t) for t = 0..T from the recursion; element 0 is 0.
std::vector<double> CumulativeBudget(const SensitivityParams& params,
                                     const AgentNoise& noise, int64_t horizon);

struct CalibratedNoise {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_z = 0.0;
};

// Splits `epsilon` evenly over the three infinite-horizon terms. Throws
// std::invalid_argument on epsilon ≤ 0 or a non-positive exponent gap.
CalibratedNoise CalibrateNoise(double epsilon, const SensitivityParams& params,
                               const AgentNoise& noise);

// What a finished run actually reached, per agent.
struct TrajectoryExtremes {
  double max_z_norm = 0.0;
  double max_l1 = 0.0;
};

struct BoundAuditEntry {
  int agent = 0;
  double max_z_norm = 0.0;
  double max_l1 = 0.0;
  bool z_within = false;
  bool l_within = false;
};

struct BoundAudit {
  std::vector<BoundAuditEntry> agents;
  // False when any agent exceeded an assumed bound: the budget is unsound.
  bool sound = false;
  // Smallest bounds consistent with the run.
  double tightest_bound_z = 0.0;
  double tightest_bound_l = 0.0;

  std::string ToString() const;
};

BoundAudit EmpiricalBoundCheck(const std::vector<TrajectoryExtremes>& run,
                               const OracleConstants& oracle);

}  // namespace ldpagg

#endif  // LDPAGG_PRIVACY_H_
