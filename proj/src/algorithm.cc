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

#include "ldpagg/algorithm.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ldpagg {
namespace {

void CheckCompatible(const Problem& problem, const NetworkTopology& topology,
                     const ScheduleSet& schedules) {
  if (problem.num_agents() != topology.num_agents()) {
    throw std::invalid_argument("problem has " +
                                std::to_string(problem.num_agents()) +
                                " agents but the topology has " +
                                std::to_string(topology.num_agents()));
  }
  if (schedules.num_agents() != topology.num_agents()) {
    throw std::invalid_argument(
        "noise schedules do not list one entry per agent");
  }
  schedules.ValidateStructure();
}

Vector InitialX(const Problem& problem, const InitOptions& init,
                RngStream& rng) {
  if (init.x0) {
    if (init.x0->size() != problem.total_dim()) {
      throw std::invalid_argument("initial x has the wrong dimension");
    }
    return ProjectBox(*init.x0, problem.box());
  }
  const Box& box = problem.box();
  Vector x(problem.total_dim());
  for (int k = 0; k < x.size(); ++k) {
    const double lo = std::max(box.lo(k), init.x_lo.value_or(box.lo(k)));
    const double hi = std::min(box.hi(k), init.x_hi.value_or(box.hi(k)));
    if (lo > hi) throw std::invalid_argument("initial x range misses the box");
    x(k) = rng.Uniform(lo, hi);
  }
  return x;
}

// acc += Σ_{j∈N_i} w_ij (received_j − own).
void AddConsensus(const NetworkTopology& topology, int i,
                  const std::vector<Vector>& received, const Vector& own,
                  Vector& acc) {
  for (int j : topology.neighbors(i)) {
    acc.noalias() += topology.weight(i, j) * (received[j] - own);
  }
}

bool AllFinite(const AgentState& s) {
  return s.x.allFinite() && s.y.allFinite() && s.z.allFinite();
}

}  // namespace

AgentState::AgentState(const AgentState& other)
    : x(other.x),
      y(other.y),
      z(other.z),
      last_dy(other.last_dy),
      last_dz(other.last_dz),
      oracle(other.oracle ? other.oracle->Clone() : nullptr),
      data_rng(other.data_rng),
      noise_x_rng(other.noise_x_rng),
      noise_y_rng(other.noise_y_rng),
      noise_z_rng(other.noise_z_rng),
      max_z_norm(other.max_z_norm),
      max_l1(other.max_l1),
      scratch(other.scratch) {}

AgentState& AgentState::operator=(const AgentState& other) {
  if (this != &other) {
    AgentState copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void EmitFrame(const ScheduleSet& schedules, int i, int64_t t,
               AgentState& state, BroadcastFrame& frame) {
  frame.x[i] = state.x;
  frame.y[i] = state.y;
  frame.z[i] = state.z;
  if (!schedules.noise_enabled) return;
  frame.x[i] += SampleLaplace(state.noise_x_rng,
                              schedules.noise_x[i].LaplaceScale(t),
                              static_cast<int>(state.x.size()));
  frame.y[i] += SampleLaplace(state.noise_y_rng,
                              schedules.noise_y[i].LaplaceScale(t),
                              static_cast<int>(state.y.size()));
  frame.z[i] += SampleLaplace(state.noise_z_rng,
                              schedules.noise_z[i].LaplaceScale(t),
                              static_cast<int>(state.z.size()));
}

void UpdateAgent(const RoundContext& ctx, int i, int64_t t,
                 const BroadcastFrame& prev, AgentState& s,
                 BroadcastFrame& next) {
  const Problem& problem = ctx.problem;
  const int offset = problem.block_offset(i);
  const int ni = problem.block_dim(i);
  const double lambda_y = ctx.schedules.lambda_y.At(t);
  const double lambda_z = ctx.schedules.lambda_z.At(t);
  const double lambda_x = ctx.schedules.lambda_x.At(t);
  auto& w = s.scratch;
  const Vector own = s.x.segment(offset, ni);

  s.oracle->DrawSample(s.data_rng);
  s.max_l1 = std::max(
      s.max_l1, s.oracle->SampleL(own, s.oracle->sample_count() - 1).lpNorm<1>());

  // Aggregate tracker.
  s.oracle->ErmG(own, w.g);
  w.y_next = s.y;
  AddConsensus(ctx.topology, i, prev.y, s.y, w.y_next);
  w.y_next.noalias() += lambda_y * w.g;
  s.last_dy = w.y_next - s.y;
  w.y_tilde = s.last_dy / lambda_y;

  // Gradient tracker.
  s.oracle->ErmGradFy(own, w.y_tilde, w.grad_y);
  w.z_next = s.z;
  AddConsensus(ctx.topology, i, prev.z, s.z, w.z_next);
  w.z_next.noalias() += lambda_z * w.grad_y;
  s.last_dz = w.z_next - s.z;
  w.z_tilde = s.last_dz / lambda_z;

  // Descent on the own block, consensus on the full stack.
  s.oracle->ErmGradFx(own, w.y_tilde, w.grad_x);
  s.oracle->ErmJacobianT(own, w.jacobian_t);
  w.grad_x.noalias() += w.jacobian_t * w.z_tilde;
  w.x_next = s.x;
  AddConsensus(ctx.topology, i, prev.x, s.x, w.x_next);
  w.x_next.segment(offset, ni) -= lambda_x * w.grad_x;
  problem.box().Project(w.x_next);

  s.x.swap(w.x_next);
  s.y.swap(w.y_next);
  s.z.swap(w.z_next);
  s.max_z_norm = std::max(s.max_z_norm, s.z.norm());

  EmitFrame(ctx.schedules, i, t + 1, s, next);
}

void IterateSerial(const RoundContext& ctx, int64_t t,
                   std::vector<AgentState>& states, const BroadcastFrame& prev,
                   BroadcastFrame& next) {
  for (int i = 0; i < static_cast<int>(states.size()); ++i) {
    UpdateAgent(ctx, i, t, prev, states[i], next);
  }
}

void IterateParallel(const RoundContext& ctx, int64_t t,
                     std::vector<AgentState>& states, const BroadcastFrame& prev,
                     BroadcastFrame& next) {
  const int m = static_cast<int>(states.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    UpdateAgent(ctx, i, t, prev, states[i], next);
  }
}

PrivateTracking::PrivateTracking(const Problem& problem,
                                 const NetworkTopology& topology,
                                 const ScheduleSet& schedules,
                                 uint64_t run_seed, const InitOptions& init)
    : ctx_{problem, topology, schedules} {
  CheckCompatible(problem, topology, schedules);
  const int m = problem.num_agents();
  const int r = problem.aggregate_dim();
  states_.resize(m);
  for (BroadcastFrame* f : {&frame_, &next_}) {
    f->x.resize(m);
    f->y.resize(m);
    f->z.resize(m);
  }
  for (int i = 0; i < m; ++i) {
    AgentState& s = states_[i];
    RngStream init_rng(StreamSeed(run_seed, i, StreamTag::kInit));
    s.x = InitialX(problem, init, init_rng);
    s.y = Vector::Zero(r);
    s.z = Vector::Zero(r);
    s.last_dy = Vector::Zero(r);
    s.last_dz = Vector::Zero(r);
    s.oracle = problem.MakeOracle(i);
    s.data_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kData));
    s.noise_x_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kNoiseX));
    s.noise_y_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kNoiseY));
    s.noise_z_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kNoiseZ));
    const int ni = problem.block_dim(i);
    s.scratch.g.resize(r);
    s.scratch.grad_y.resize(r);
    s.scratch.grad_x.resize(ni);
    s.scratch.jacobian_t.resize(ni, r);
    EmitFrame(schedules, i, 0, s, frame_);
  }
}

void PrivateTracking::Step() {
  IterateSerial(ctx_, t_, states_, frame_, next_);
  Finish();
}

void PrivateTracking::StepParallel() {
  IterateParallel(ctx_, t_, states_, frame_, next_);
  Finish();
}

void PrivateTracking::Finish() {
  for (size_t i = 0; i < states_.size(); ++i) {
    if (!AllFinite(states_[i])) {
      throw NumericalAbort(t_, "agent " + std::to_string(i));
    }
  }
  std::swap(frame_, next_);
  ++t_;
}

Vector PrivateTracking::OwnBlocks() const {
  const Problem& p = ctx_.problem;
  Vector out(p.total_dim());
  for (int i = 0; i < num_agents(); ++i) {
    out.segment(p.block_offset(i), p.block_dim(i)) =
        states_[i].x.segment(p.block_offset(i), p.block_dim(i));
  }
  return out;
}

double Dispersion(const std::vector<Vector>& values) {
  if (values.empty()) return 0.0;
  Vector mean = Vector::Zero(values.front().size());
  for (const auto& v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (const auto& v : values) sum += (v - mean).squaredNorm();
  return sum;
}

// ---------------------------------------------------------------------------

GradientTrackingBaseline::GradientTrackingBaseline(
    const Problem& problem, const NetworkTopology& topology,
    const ScheduleSet& schedules, uint64_t run_seed, const InitOptions& init)
    : ctx_{problem, topology, schedules} {
  CheckCompatible(problem, topology, schedules);
  const int m = problem.num_agents();
  const int r = problem.aggregate_dim();
  states_.resize(m);
  frame_s_.resize(m);
  frame_q_.resize(m);
  next_s_.resize(m);
  next_q_.resize(m);
  for (int i = 0; i < m; ++i) {
    BaselineAgentState& s = states_[i];
    RngStream init_rng(StreamSeed(run_seed, i, StreamTag::kInit));
    s.x = InitialX(problem, init, init_rng)
              .segment(problem.block_offset(i), problem.block_dim(i));
    s.s = Vector::Zero(r);
    s.q = Vector::Zero(r);
    s.prev_g = Vector::Zero(r);
    s.prev_q = Vector::Zero(r);
    s.oracle = problem.MakeOracle(i);
    s.data_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kData));
    s.noise_s_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kNoiseY));
    s.noise_q_rng = RngStream(StreamSeed(run_seed, i, StreamTag::kNoiseZ));
  }
  for (int i = 0; i < m; ++i) Emit(i, 0);
  std::swap(frame_s_, next_s_);
  std::swap(frame_q_, next_q_);
}

void GradientTrackingBaseline::Emit(int i, int64_t t) {
  BaselineAgentState& s = states_[i];
  next_s_[i] = s.s;
  next_q_[i] = s.q;
  if (!ctx_.schedules.noise_enabled) return;
  const int r = static_cast<int>(s.s.size());
  next_s_[i] += SampleLaplace(s.noise_s_rng,
                              ctx_.schedules.noise_y[i].LaplaceScale(t), r);
  next_q_[i] += SampleLaplace(s.noise_q_rng,
                              ctx_.schedules.noise_z[i].LaplaceScale(t), r);
}

void GradientTrackingBaseline::Step() {
  const Problem& problem = ctx_.problem;
  const double lambda_x = ctx_.schedules.lambda_x.At(t_);
  const int r = problem.aggregate_dim();
  for (int i = 0; i < static_cast<int>(states_.size()); ++i) {
    BaselineAgentState& s = states_[i];
    const int offset = problem.block_offset(i);
    const int ni = problem.block_dim(i);
    s.oracle->DrawSample(s.data_rng);

    Vector g(r);
    s.oracle->ErmG(s.x, g);
    Vector s_next = s.s;
    AddConsensus(ctx_.topology, i, frame_s_, s.s, s_next);
    s_next += g - s.prev_g;
    s.prev_g = g;

    Vector gy(r);
    s.oracle->ErmGradFy(s.x, s_next, gy);
    Vector q_next = s.q;
    AddConsensus(ctx_.topology, i, frame_q_, s.q, q_next);
    q_next += gy - s.prev_q;
    s.prev_q = gy;

    Vector gx(ni);
    Matrix jt(ni, r);
    s.oracle->ErmGradFx(s.x, s_next, gx);
    s.oracle->ErmJacobianT(s.x, jt);
    gx.noalias() += jt * q_next;
    s.x -= lambda_x * gx;
    problem.box().Segment(offset, ni).Project(s.x);
    s.s = std::move(s_next);
    s.q = std::move(q_next);
    Emit(i, t_ + 1);
  }
  for (size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (!(s.x.allFinite() && s.s.allFinite() && s.q.allFinite())) {
      throw NumericalAbort(t_, "baseline agent " + std::to_string(i));
    }
  }
  std::swap(frame_s_, next_s_);
  std::swap(frame_q_, next_q_);
  ++t_;
}

Vector GradientTrackingBaseline::OwnBlocks() const {
  const Problem& p = ctx_.problem;
  Vector out(p.total_dim());
  for (size_t i = 0; i < states_.size(); ++i) {
    out.segment(p.block_offset(static_cast<int>(i)),
                p.block_dim(static_cast<int>(i))) = states_[i].x;
  }
  return out;
}

double GradientTrackingBaseline::TrackerDriftSq() const {
  const int r = ctx_.problem.aggregate_dim();
  Vector ds = Vector::Zero(r);
  Vector dq = Vector::Zero(r);
  for (const auto& s : states_) {
    ds += s.s - s.prev_g;
    dq += s.q - s.prev_q;
  }
  const double m = static_cast<double>(states_.size());
  return (ds / m).squaredNorm() + (dq / m).squaredNorm();
}

double GradientTrackingBaseline::TrackerDispersion() const {
  std::vector<Vector> values;
  values.reserve(states_.size());
  for (const auto& s : states_) values.push_back(s.s);
  return Dispersion(values);
}

}  // namespace ldpagg
