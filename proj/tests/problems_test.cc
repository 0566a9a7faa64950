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

#include "ldpagg/problems.h"

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "test_util.h"

namespace ldpagg {
namespace {

using testing::LoadFixture;
using testing::ReferenceQuadratic;
using testing::ToVector;

PersonalizedSpec SmallPersonalized() {
  PersonalizedSpec s;
  s.num_agents = 3;
  s.classes = 3;
  s.features = 2;
  s.samples_per_agent = 40;
  return s;
}

Vector RandomPoint(RngStream& rng, int dim, double scale) {
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = scale * rng.Uniform(-1.0, 1.0);
  return v;
}

// Central differences of a scalar function, compared in relative ℓ₂ error.
double RelativeFdError(const std::function<double(const Vector&)>& f,
                       const Vector& at, const Vector& grad, double h = 1e-5) {
  Vector fd(at.size());
  for (int k = 0; k < at.size(); ++k) {
    Vector up = at, down = at;
    up[k] += h;
    down[k] -= h;
    fd[k] = (f(up) - f(down)) / (2 * h);
  }
  return (fd - grad).norm() / grad.norm();
}

TEST(Quadratic, DataAndOptimumMatchFrozenFixture) {
  const nlohmann::json fx = LoadFixture("quadratic_m5_seed7.json");
  const QuadraticProblem p(ReferenceQuadratic());
  for (int i = 0; i < 5; ++i) {
    const auto& a = fx["agents"][i];
    for (int r = 0; r < 2; ++r) {
      EXPECT_DOUBLE_EQ((p.agent(i).a.row(r).transpose() - ToVector(a["a"][r])).norm(), 0.0);
    }
    EXPECT_DOUBLE_EQ((p.agent(i).b - ToVector(a["b"])).norm(), 0.0);
    EXPECT_DOUBLE_EQ((p.agent(i).c - ToVector(a["c"])).norm(), 0.0);
    EXPECT_DOUBLE_EQ((p.agent(i).d - ToVector(a["d"])).norm(), 0.0);
  }
  ASSERT_TRUE(p.optimum().has_value());
  const Vector x_star = ToVector(fx["x_star"]);
  EXPECT_LT((*p.optimum() - x_star).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(*p.optimal_value(), fx["F_star"].get<double>(), 1e-10);
  EXPECT_LT(p.Gradient(x_star).norm(), 1e-8);
}

TEST(Quadratic, ExplicitAgentsRoundTrip) {
  const QuadraticProblem generated(ReferenceQuadratic());
  QuadraticSpec s = ReferenceQuadratic();
  for (int i = 0; i < 5; ++i) s.agents.push_back(generated.agent(i));
  s.seed = 999;  // ignored once agents are given
  const QuadraticProblem explicit_data(s);
  EXPECT_EQ(*explicit_data.optimum(), *generated.optimum());
}

TEST(Quadratic, RejectsBadSpecs) {
  QuadraticSpec s = ReferenceQuadratic();
  s.gamma = -1;
  EXPECT_THROW(QuadraticProblem{s}, std::invalid_argument);
  s = ReferenceQuadratic();
  s.block_dims = {2, 2};
  EXPECT_THROW(QuadraticProblem{s}, std::invalid_argument);
  s = ReferenceQuadratic();
  s.box_lo = 1;
  s.box_hi = -1;
  EXPECT_THROW(QuadraticProblem{s}, std::invalid_argument);
}

// Single-sample oracle outputs averaged over fresh draws must hit the exact
// expectation within three standard errors, componentwise.
void ExpectUnbiased(const Problem& p, int agent, const Vector& x, const Vector& y,
                    int draws, uint64_t seed) {
  auto oracle = p.MakeOracle(agent);
  RngStream rng(seed);
  for (int k = 0; k < draws; ++k) oracle->DrawSample(rng);
  auto check = [&](const char* what, const Vector& expected,
                   const std::function<Vector(int64_t)>& sample) {
    Vector s1 = Vector::Zero(expected.size()), s2 = s1;
    for (int k = 0; k < draws; ++k) {
      const Vector v = sample(k);
      s1 += v;
      s2 += v.cwiseProduct(v);
    }
    const Vector mean = s1 / draws;
    for (int c = 0; c < expected.size(); ++c) {
      const double var = std::max(0.0, s2[c] / draws - mean[c] * mean[c]);
      const double se = std::sqrt(var / draws);
      EXPECT_LE(std::abs(mean[c] - expected[c]), 3.0 * se + 1e-10 * (1.0 + std::abs(expected[c])))
          << what << " agent " << agent << " component " << c;
    }
  };
  const auto flat = [](const Matrix& m) {
    return Vector(Eigen::Map<const Vector>(m.data(), m.size()));
  };
  check("l", p.ExpectedG(agent, x), [&](int64_t k) { return oracle->SampleL(x, k); });
  check("grad_x h", p.ExpectedGradFx(agent, x, y),
        [&](int64_t k) { return oracle->SampleGradHx(x, y, k); });
  check("grad_y h", p.ExpectedGradFy(agent, x, y),
        [&](int64_t k) { return oracle->SampleGradHy(x, y, k); });
  check("jacobian", flat(p.ExpectedJacobianT(agent, x)),
        [&](int64_t k) { return flat(oracle->SampleJacobianT(x, k)); });
}

TEST(Quadratic, OraclesUnbiased) {
  const QuadraticProblem p(ReferenceQuadratic());
  RngStream rng(5);
  for (int i = 0; i < p.num_agents(); ++i) {
    ExpectUnbiased(p, i, RandomPoint(rng, 2, 2.0), RandomPoint(rng, 2, 2.0), 20000,
                   100 + i);
  }
}

TEST(Personalized, OraclesUnbiased) {
  const PersonalizedProblem p(SmallPersonalized());
  RngStream rng(6);
  for (int i = 0; i < p.num_agents(); ++i) {
    ExpectUnbiased(p, i, RandomPoint(rng, p.block_dim(i), 0.5),
                   RandomPoint(rng, 1, 1.0), 20000, 200 + i);
  }
}

void ExpectGradientsMatchDifferences(const Problem& p, const std::vector<int>& draws,
                                     double scale) {
  RngStream rng(17);
  for (int i = 0; i < p.num_agents(); ++i) {
    auto oracle = p.MakeOracle(i);
    for (int k = 0; k < draws[i]; ++k) oracle->DrawSample(rng);
    const int n = p.block_dim(i);
    const int r = p.aggregate_dim();
    const Vector x = RandomPoint(rng, n, scale);
    const Vector y = RandomPoint(rng, r, scale);

    Vector gx(n), gy(r);
    oracle->ErmGradFx(x, y, gx);
    oracle->ErmGradFy(x, y, gy);
    EXPECT_LE(RelativeFdError([&](const Vector& v) { return oracle->ErmH(v, y); }, x, gx),
              1e-5);
    EXPECT_LE(RelativeFdError([&](const Vector& v) { return oracle->ErmH(x, v); }, y, gy),
              1e-5);

    Matrix jt(n, r);
    oracle->ErmJacobianT(x, jt);
    for (int c = 0; c < r; ++c) {
      const auto component = [&](const Vector& v) {
        Vector g(r);
        oracle->ErmG(v, g);
        return g[c];
      };
      EXPECT_LE(RelativeFdError(component, x, jt.col(c)), 1e-5);
    }
    for (int k = 0; k < std::min<int>(draws[i], 3); ++k) {
      EXPECT_LE(RelativeFdError([&](const Vector& v) { return oracle->SampleH(v, y, k); },
                                x, oracle->SampleGradHx(x, y, k)),
                1e-5);
    }
  }
  const Vector x = RandomPoint(rng, p.total_dim(), scale);
  EXPECT_LE(RelativeFdError([&](const Vector& v) { return p.Objective(v); }, x,
                            p.Gradient(x)),
            1e-5);
}

TEST(Quadratic, GradientsMatchFiniteDifferences) {
  const QuadraticProblem p(ReferenceQuadratic());
  ExpectGradientsMatchDifferences(p, {7, 1, 30, 4, 12}, 3.0);
}

TEST(Personalized, GradientsMatchFiniteDifferences) {
  const PersonalizedProblem p(SmallPersonalized());
  ExpectGradientsMatchDifferences(p, {25, 3, 60}, 0.7);
}

TEST(Personalized, SoftmaxGradientMatchesDifferences) {
  RngStream rng(4);
  LabeledPoint pt{Vector(3), 2};
  pt.features << 0.4, -1.3, 1.0;
  const Vector x = RandomPoint(rng, 9, 1.0);
  Vector grad;
  SoftmaxLoss(x, pt, 3, 0.05, &grad);
  EXPECT_LE(RelativeFdError([&](const Vector& v) { return SoftmaxLoss(v, pt, 3, 0.05, nullptr); },
                            x, grad),
            1e-6);
}

void ExpectFastPathAgrees(const Problem& p, int draws) {
  RngStream rng(23);
  for (int i = 0; i < p.num_agents(); ++i) {
    auto fast = p.MakeOracle(i);
    ASSERT_TRUE(fast->has_fast_path());
    for (int k = 0; k < draws; ++k) fast->DrawSample(rng);
    auto full = fast->Clone();
    full->set_fast_path(false);
    const int n = p.block_dim(i), r = p.aggregate_dim();
    const Vector x = RandomPoint(rng, n, 1.0), y = RandomPoint(rng, r, 1.0);
    Vector a(r), b(r), ax(n), bx(n), ay(r), by(r);
    Matrix ja(n, r), jb(n, r);
    fast->ErmG(x, a);
    full->ErmG(x, b);
    fast->ErmGradFx(x, y, ax);
    full->ErmGradFx(x, y, bx);
    fast->ErmGradFy(x, y, ay);
    full->ErmGradFy(x, y, by);
    fast->ErmJacobianT(x, ja);
    full->ErmJacobianT(x, jb);
    EXPECT_LE((a - b).norm(), 1e-12 * (1 + b.norm()));
    EXPECT_LE((ax - bx).norm(), 1e-12 * (1 + bx.norm()));
    EXPECT_LE((ay - by).norm(), 1e-12 * (1 + by.norm()));
    EXPECT_LE((ja - jb).norm(), 1e-12 * (1 + jb.norm()));
  }
}

TEST(Quadratic, FastPathMatchesFullPass) {
  ExpectFastPathAgrees(QuadraticProblem(ReferenceQuadratic()), 500);
}

TEST(Personalized, FastPathMatchesFullPass) {
  ExpectFastPathAgrees(PersonalizedProblem(SmallPersonalized()), 500);
}

TEST(Personalized, IdenticalAgentsGiveSymmetricGradients) {
  PersonalizedSpec s = SmallPersonalized();
  s.identical_agents = true;
  const PersonalizedProblem p(s);
  RngStream rng(8);
  const Vector block = RandomPoint(rng, p.block_dim(0), 0.5);
  Vector x(p.total_dim());
  for (int i = 0; i < p.num_agents(); ++i) x.segment(p.block_offset(i), p.block_dim(i)) = block;
  const Vector g = p.Gradient(x);
  for (int i = 1; i < p.num_agents(); ++i) {
    EXPECT_EQ(g.segment(p.block_offset(i), p.block_dim(i)), g.segment(0, p.block_dim(0)));
  }
  EXPECT_FALSE(p.optimum().has_value());
}

TEST(Box, ProjectionIsNearestPointOnGrid) {
  Box box;
  box.lo = Vector(2);
  box.hi = Vector(2);
  box.lo << -1.0, 0.5;
  box.hi << 2.0, 1.5;
  RngStream rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const Vector p = RandomPoint(rng, 2, 4.0);
    const Vector proj = ProjectBox(p, box);
    EXPECT_TRUE(box.Contains(proj));
    const double best = (proj - p).norm();
    for (int a = 0; a <= 60; ++a) {
      for (int b = 0; b <= 20; ++b) {
        Vector q(2);
        q << -1.0 + 3.0 * a / 60.0, 0.5 + b / 20.0;
        EXPECT_LE(best, (q - p).norm() + 1e-12);
      }
    }
  }
  Box bad = box;
  bad.lo[0] = 5.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(Centralized, BoxActiveOptimumIsProjectedFixedPoint) {
  QuadraticSpec s = ReferenceQuadratic();
  s.box_lo = -0.3;
  s.box_hi = 0.3;
  const QuadraticProblem p(s);
  const Vector& x = *p.optimum();
  const double step = 1.0 / p.GradientLipschitz();
  const Vector again = ProjectBox(x - step * p.Gradient(x), p.box());
  EXPECT_LT((again - x).norm(), 1e-10);
  EXPECT_GT((x.cwiseAbs().array() >= 0.3 - 1e-12).count(), 0);
}

}  // namespace
}  // namespace ldpagg
