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

#include <omp.h>

#include <gtest/gtest.h>

#include "ldpagg/analysis.h"
#include "test_util.h"

namespace ldpagg {
namespace {

using testing::ReferenceQuadratic;

ScheduleSet PresetSchedules(int m, double sigma, ConvexityCase c = ConvexityCase::kStronglyConvex) {
  return UniformScheduleSet(RatePreset(c, 0.01), m, 1.0, 1.0, 1.0, sigma, sigma, sigma);
}

QuadraticSpec NoiselessQuadratic(int m) {
  QuadraticSpec s = ReferenceQuadratic();
  s.num_agents = m;
  s.xi_std = 0.0;
  s.phi_std = 0.0;
  return s;
}

// Projected gradient descent on F(x) = κ/2‖x − c‖² + γ/2‖Ax + b − d‖²,
// written out directly from the data.
std::vector<Vector> CentralizedTrajectory(const QuadraticProblem& p, const Vector& x0,
                                          const StepsizeSchedule& step, int rounds) {
  const QuadraticAgentData& a = p.agent(0);
  const double kappa = p.spec().x_weight;
  const double gamma = p.spec().gamma;
  std::vector<Vector> out{x0};
  Vector x = x0;
  for (int t = 0; t < rounds; ++t) {
    const Vector grad = kappa * (x - a.c) + gamma * a.a.transpose() * (a.a * x + a.b - a.d);
    x = x - step.At(t) * grad;
    for (int k = 0; k < x.size(); ++k) {
      x[k] = std::min(p.spec().box_hi, std::max(p.spec().box_lo, x[k]));
    }
    out.push_back(x);
  }
  return out;
}

TEST(PrivateTracking, SingleAgentReducesToProjectedGradient) {
  for (double box : {10.0, 0.4}) {
    QuadraticSpec spec = NoiselessQuadratic(1);
    spec.box_lo = -box;
    spec.box_hi = box;
    const QuadraticProblem p(spec);
    const NetworkTopology topo = NetworkTopology::Trivial();
    ScheduleSet sched = PresetSchedules(1, 1.0);
    sched.noise_enabled = false;
    InitOptions init;
    init.x0 = Vector(2);
    *init.x0 << 3.0, -2.0;
    PrivateTracking run(p, topo, sched, 99, init);
    const auto expected =
        CentralizedTrajectory(p, ProjectBox(*init.x0, p.box()), sched.lambda_x, 10000);
    double worst = 0.0;
    for (int t = 0; t <= 10000; ++t) {
      worst = std::max(worst, (run.OwnBlocks() - expected[t]).cwiseAbs().maxCoeff());
      if (t < 10000) run.Step();
    }
    EXPECT_LE(worst, 1e-10) << "box " << box;
  }
}

TEST(PrivateTracking, SerialAndParallelAreBitIdentical) {
  const QuadraticProblem p(ReferenceQuadratic());
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  const ScheduleSet sched = PresetSchedules(5, 1.0);
  PrivateTracking serial(p, topo, sched, 1234);
  PrivateTracking parallel(p, topo, sched, 1234);
  omp_set_num_threads(4);
  for (int t = 0; t < 300; ++t) {
    serial.Step();
    parallel.StepParallel();
  }
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(serial.states()[i].x, parallel.states()[i].x);
    EXPECT_EQ(serial.states()[i].y, parallel.states()[i].y);
    EXPECT_EQ(serial.states()[i].z, parallel.states()[i].z);
    EXPECT_EQ(serial.frame().x[i], parallel.frame().x[i]);
    EXPECT_EQ(serial.frame().z[i], parallel.frame().z[i]);
  }
}

// Every broadcast equals the private state plus Laplace noise replayed from
// the agent's own noise streams, at the scale of that round.
TEST(PrivateTracking, FrameIsStatePlusReplayedNoise) {
  const QuadraticProblem p(ReferenceQuadratic());
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  const ScheduleSet sched = PresetSchedules(5, 0.5);
  const uint64_t seed = 77;
  PrivateTracking run(p, topo, sched, seed);
  std::vector<RngStream> nx, ny, nz;
  for (int i = 0; i < 5; ++i) {
    nx.emplace_back(StreamSeed(seed, i, StreamTag::kNoiseX));
    ny.emplace_back(StreamSeed(seed, i, StreamTag::kNoiseY));
    nz.emplace_back(StreamSeed(seed, i, StreamTag::kNoiseZ));
  }
  for (int64_t t = 0; t < 200; ++t) {
    for (int i = 0; i < 5; ++i) {
      const AgentState& s = run.states()[i];
      const Vector ex = s.x + SampleLaplace(nx[i], sched.noise_x[i].LaplaceScale(t), 10);
      const Vector ey = s.y + SampleLaplace(ny[i], sched.noise_y[i].LaplaceScale(t), 2);
      const Vector ez = s.z + SampleLaplace(nz[i], sched.noise_z[i].LaplaceScale(t), 2);
      ASSERT_EQ(run.frame().x[i], ex) << "t=" << t << " agent " << i;
      ASSERT_EQ(run.frame().y[i], ey) << "t=" << t << " agent " << i;
      ASSERT_EQ(run.frame().z[i], ez) << "t=" << t << " agent " << i;
      ASSERT_NE(run.frame().x[i], s.x);
    }
    run.Step();
  }
}

// Zero column sums make the network mean of y move by exactly the mean
// local input plus the degree-weighted mean of the received noise.
TEST(PrivateTracking, TrackerMeanIdentity) {
  const QuadraticProblem p(ReferenceQuadratic());
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  const ScheduleSet sched = PresetSchedules(5, 0.5);
  PrivateTracking run(p, topo, sched, 5);
  for (int t = 0; t < 50; ++t) {
    const std::vector<AgentState> before = run.states();
    const BroadcastFrame frame = run.frame();
    run.Step();
    Vector lhs = Vector::Zero(2), input = Vector::Zero(2), noise = Vector::Zero(2);
    for (int i = 0; i < 5; ++i) {
      lhs += run.states()[i].y - before[i].y;
      Vector g(2);
      run.states()[i].oracle->ErmG(before[i].x.segment(2 * i, 2), g);
      input += g;
      noise += -topo.weight(i, i) * (frame.y[i] - before[i].y);
    }
    const Vector rhs = sched.lambda_y.At(t) * input + noise;
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1 + rhs.norm())) << t;
  }
}

TEST(PrivateTracking, TwoIdenticalAgentsStaySymmetric) {
  QuadraticSpec spec = NoiselessQuadratic(2);
  const QuadraticProblem generated(spec);
  spec.agents = {generated.agent(0), generated.agent(0)};
  const QuadraticProblem p(spec);
  const NetworkTopology topo = NetworkTopology::Ring(2, 0.3);
  ScheduleSet sched = PresetSchedules(2, 1.0);
  sched.noise_enabled = false;
  InitOptions init;
  init.x0 = Vector(4);
  *init.x0 << 0.5, -0.2, 0.5, -0.2;
  PrivateTracking run(p, topo, sched, 3, init);
  for (int t = 0; t < 500; ++t) {
    run.Step();
    const AgentState& a = run.states()[0];
    const AgentState& b = run.states()[1];
    Vector swapped(4);
    swapped << b.x.segment(2, 2), b.x.segment(0, 2);
    ASSERT_LE((a.x - swapped).norm(), 1e-13) << t;
    ASSERT_LE((a.y - b.y).norm(), 1e-13) << t;
    ASSERT_LE((a.z - b.z).norm(), 1e-13) << t;
  }
}

TEST(PrivateTracking, ConvergesWithoutNoise) {
  const QuadraticProblem p(NoiselessQuadratic(5));
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  ScheduleSet sched = PresetSchedules(5, 1.0);
  sched.noise_enabled = false;
  PrivateTracking run(p, topo, sched, 8);
  for (int t = 0; t < 5000; ++t) run.Step();
  EXPECT_LT(*ErrToOptSq(p, run.OwnBlocks()), 1e-8);
  EXPECT_LT(ConsensusX(run.states()), 1e-8);
}

TEST(PrivateTracking, RejectsMismatchedSizes) {
  const QuadraticProblem p(ReferenceQuadratic());
  const NetworkTopology topo = NetworkTopology::Ring(4, 0.3);
  EXPECT_THROW(PrivateTracking(p, topo, PresetSchedules(5, 1.0), 1), std::invalid_argument);
  InitOptions init;
  init.x0 = Vector::Zero(3);
  EXPECT_THROW(PrivateTracking(p, NetworkTopology::Ring(5, 0.3), PresetSchedules(5, 1.0), 1, init),
               std::invalid_argument);
}

TEST(PrivateTracking, NonFiniteStateAborts) {
  QuadraticSpec spec = ReferenceQuadratic();
  spec.box_lo = -1e308;
  spec.box_hi = 1e308;
  spec.x_weight = 1e300;
  const QuadraticProblem p(spec);
  ScheduleSet sched = PresetSchedules(5, 1.0);
  sched.lambda_x.lambda0 = 1e10;
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  PrivateTracking run(p, topo, sched, 1);
  EXPECT_THROW(
      {
        for (int t = 0; t < 100; ++t) run.Step();
      },
      NumericalAbort);
}

TEST(Baseline, ConvergesWithoutNoise) {
  const QuadraticProblem p(NoiselessQuadratic(5));
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  ScheduleSet sched = PresetSchedules(5, 1.0);
  sched.noise_enabled = false;
  GradientTrackingBaseline run(p, topo, sched, 8);
  for (int t = 0; t < 5000; ++t) run.Step();
  EXPECT_LT(*ErrToOptSq(p, run.OwnBlocks()), 1e-8);
  EXPECT_LT(run.TrackerDriftSq(), 1e-20);
}

TEST(Baseline, ConstantNoiseMakesTrackersDrift) {
  const QuadraticProblem p(ReferenceQuadratic());
  const NetworkTopology topo = NetworkTopology::Ring(5, 0.3);
  ScheduleSet sched = PresetSchedules(5, 1.0);
  for (auto* n : {&sched.noise_y, &sched.noise_z}) {
    for (auto& e : *n) e.varsigma = 0.0;
  }
  GradientTrackingBaseline run(p, topo, sched, 8);
  double early = 0.0;
  for (int t = 1; t <= 4000; ++t) {
    run.Step();
    if (t == 400) early = run.TrackerDriftSq();
  }
  EXPECT_GT(run.TrackerDriftSq(), 3.0 * early);
}

TEST(Dispersion, SumOfSquaredDeviations) {
  std::vector<Vector> v(3, Vector::Zero(2));
  EXPECT_EQ(Dispersion(v), 0.0);
  v[0] << 1, 0;
  v[1] << -1, 0;
  EXPECT_NEAR(Dispersion(v), 2.0, 1e-15);
}

}  // namespace
}  // namespace ldpagg
