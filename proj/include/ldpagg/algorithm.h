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

// Round-synchronous simulation of the private aggregative tracking method.
//
// Agent i keeps an estimate x_i ∈ Ω ⊂ ℝⁿ of every agent's block, an aggregate
// tracker y_i ∈ ℝʳ and a gradient tracker z_i ∈ ℝʳ. In round t it reads only
// the obscured values its neighbors broadcast at the end of round t − 1:
//
//   y_i ← y_i + Σ_j w_ij (ŷ_j − y_i) + λ_y g_i^t(x_i,own)
//   ỹ_i = Δy_i / λ_y
//   z_i ← z_i + Σ_j w_ij (ẑ_j − z_i) + λ_z ∇_y f_i^t(x_i,own, ỹ_i)
//   z̃_i = Δz_i / λ_z
//   x_i ← Π_Ω[x_i + Σ_j w_ij (x̂_j − x_i)
//             − λ_x R_iᵀ(∇_x f_i^t(x_i,own, ỹ_i) + ∇g_i^t(x_i,own) z̃_i)]
//
// and then broadcasts x_i + ϑ, y_i + χ, z_i + ζ with fresh Laplace noise.

#ifndef LDPAGG_ALGORITHM_H_
#define LDPAGG_ALGORITHM_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ldpagg/common.h"
#include "ldpagg/problems.h"
#include "ldpagg/rng.h"
#include "ldpagg/schedules.h"
#include "ldpagg/topology.h"

namespace ldpagg {

struct AgentState {
  Vector x;  // stacked estimate, ℝⁿ
  Vector y;  // ℝʳ
  Vector z;  // ℝʳ
  // Increments of the latest round, y^{t+1} − y^t and z^{t+1} − z^t.
  Vector last_dy;
  Vector last_dz;
  std::unique_ptr<LocalOracle> oracle;

  RngStream data_rng;
  RngStream noise_x_rng;
  RngStream noise_y_rng;
  RngStream noise_z_rng;

  // Running maxima for the post-hoc audit of the bounds the accountant assumes.
  double max_z_norm = 0.0;
  double max_l1 = 0.0;

  // Scratch space reused across rounds.
  struct Scratch {
    Vector g, grad_y, grad_x, x_next, y_next, z_next, y_tilde, z_tilde;
    Matrix jacobian_t;
  } scratch;

  AgentState() = default;
  AgentState(const AgentState& other);
  AgentState& operator=(const AgentState& other);
  AgentState(AgentState&&) noexcept = default;
  AgentState& operator=(AgentState&&) noexcept = default;
};

// The obscured messages of every agent for one round.
struct BroadcastFrame {
  std::vector<Vector> x;
  std::vector<Vector> y;
  std::vector<Vector> z;
};

struct InitOptions {
  // Sampling range for the initial x, intersected with Ω. Defaults to Ω.
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  // Fixed initial x for every agent; overrides random initialization.
  std::optional<Vector> x0;
};

// Everything a round reads but never writes.
struct RoundContext {
  const Problem& problem;
  const NetworkTopology& topology;
  const ScheduleSet& schedules;
};

// One agent's round t. Reads `prev` only, writes `state` and next.{x,y,z}[i].
void UpdateAgent(const RoundContext& ctx, int i, int64_t t,
                 const BroadcastFrame& prev, AgentState& state,
                 BroadcastFrame& next);

// Serial reference round over all agents.
void IterateSerial(const RoundContext& ctx, int64_t t,
                   std::vector<AgentState>& states, const BroadcastFrame& prev,
                   BroadcastFrame& next);

// Same round with agents distributed over OpenMP threads. Bit-identical to
// IterateSerial since every agent owns its streams and scratch.
void IterateParallel(const RoundContext& ctx, int64_t t,
                     std::vector<AgentState>& states, const BroadcastFrame& prev,
                     BroadcastFrame& next);

class PrivateTracking {
 public:
  // The referenced problem, topology and schedules must outlive this object.
  PrivateTracking(const Problem& problem, const NetworkTopology& topology,
                  const ScheduleSet& schedules, uint64_t run_seed,
                  const InitOptions& init = {});

  // Runs round t = iteration() and advances. Throws NumericalAbort when any
  // state turns non-finite.
  void Step();
  void StepParallel();

  int64_t iteration() const { return t_; }
  int num_agents() const { return static_cast<int>(states_.size()); }
  const std::vector<AgentState>& states() const { return states_; }
  // Obscured messages emitted at the end of the last round (round −1 is the
  // initial broadcast).
  const BroadcastFrame& frame() const { return frame_; }

  // col(x_1, ..., x_m) built from each agent's own block.
  Vector OwnBlocks() const;

 private:
  void Finish();

  RoundContext ctx_;
  std::vector<AgentState> states_;
  BroadcastFrame frame_;
  BroadcastFrame next_;
  int64_t t_ = 0;
};

// Adds fresh noise at round index `t` to the current state of agent i and
// stores the result in the frame. Without noise the frame carries raw state.
void EmitFrame(const ScheduleSet& schedules, int i, int64_t t,
               AgentState& state, BroadcastFrame& frame);

// Σ_l ‖v_l − v̄‖².
double Dispersion(const std::vector<Vector>& values);

// ---------------------------------------------------------------------------
// Conventional gradient-tracking template for comparison. Agent i keeps only
// its own block x_i and shares two trackers:
//
//   s_i ← s_i + Σ_j w_ij (ŝ_j − s_i) + g_i^t(x_i) − (previous g_i)
//   q_i ← q_i + Σ_j w_ij (q̂_j − q_i) + ∇_y f_i^t(x_i, s_i) − (previous ∇_y f_i)
//   x_i ← Π_Ωi[x_i − λ_x (∇_x f_i^t(x_i, s_i) + ∇g_i^t(x_i) q_i)]
//
// The tracker noise uses the y and z noise schedules.
struct BaselineAgentState {
  Vector x;  // own block only
  Vector s;
  Vector q;
  Vector prev_g;
  Vector prev_q;
  std::unique_ptr<LocalOracle> oracle;
  RngStream data_rng;
  RngStream noise_s_rng;
  RngStream noise_q_rng;

  BaselineAgentState() = default;
  BaselineAgentState(BaselineAgentState&&) noexcept = default;
  BaselineAgentState& operator=(BaselineAgentState&&) noexcept = default;
};

class GradientTrackingBaseline {
 public:
  GradientTrackingBaseline(const Problem& problem,
                           const NetworkTopology& topology,
                           const ScheduleSet& schedules, uint64_t run_seed,
                           const InitOptions& init = {});

  // Throws NumericalAbort when any state turns non-finite.
  void Step();

  int64_t iteration() const { return t_; }
  const std::vector<BaselineAgentState>& states() const { return states_; }
  Vector OwnBlocks() const;
  // ‖s̄ − mean_i g_i‖² + ‖q̄ − mean_i ∇_y f_i‖²: how far the tracker averages
  // have drifted from what they should track.
  double TrackerDriftSq() const;
  // Dispersion of the shared trackers across agents.
  double TrackerDispersion() const;

 private:
  void Emit(int i, int64_t t);

  RoundContext ctx_;
  std::vector<BaselineAgentState> states_;
  std::vector<Vector> frame_s_;
  std::vector<Vector> frame_q_;
  std::vector<Vector> next_s_;
  std::vector<Vector> next_q_;
  int64_t t_ = 0;
};

}  // namespace ldpagg

#endif  // LDPAGG_ALGORITHM_H_
