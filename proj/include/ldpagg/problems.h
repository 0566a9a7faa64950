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

// Stochastic aggregative problems
//
//   min_{x ∈ Ω} Σ_i f_i(x_i, g(x)),   g(x) = (1/m) Σ_i g_i(x_i),
//   f_i(x_i, y) = E_φ[h(x_i, y; φ)],   g_i(x_i) = E_ξ[l(x_i; ξ)],
//
// and the streaming empirical versions each agent minimizes: after t + 1
// arrivals, g_i^t and f_i^t average l and h over every stored sample.
//
// Jacobians of g_i are stored transposed (n_i × r) so that ∇g_i(x_i)·z is an
// n_i-vector for z ∈ ℝʳ.

#ifndef LDPAGG_PROBLEMS_H_
#define LDPAGG_PROBLEMS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldpagg/common.h"
#include "ldpagg/rng.h"

namespace ldpagg {

// Product of coordinate intervals [lo_k, hi_k].
struct Box {
  Vector lo;
  Vector hi;

  static Box Uniform(int dim, double lo, double hi);
  int dim() const { return static_cast<int>(lo.size()); }
  // Throws std::invalid_argument on inverted or non-finite bounds.
  void Validate() const;
  bool Contains(const Vector& x, double tol = 0.0) const;
  // Componentwise clamp in place.
  void Project(Eigen::Ref<Vector> x) const;
  Box Segment(int offset, int size) const;
};

// Euclidean projection onto a box (componentwise clamp).
Vector ProjectBox(const Vector& x, const Box& box);

// Oracle variance bounds, when known analytically.
struct VarianceConstants {
  double sigma_g0_sq = 0.0;  // Var of l
  double sigma_g1_sq = 0.0;  // Var of ∇l
  double sigma_f_sq = 0.0;   // Var of ∇h
};

// One agent's stochastic oracle together with its append-only sample store.
// ERM queries average over every stored sample; they evaluate at the given
// point, never at the points where samples arrived.
class LocalOracle {
 public:
  virtual ~LocalOracle() = default;

  virtual int block_dim() const = 0;      // n_i
  virtual int aggregate_dim() const = 0;  // r

  // Draws one (φ, ξ) pair from the agent's data distribution and stores it.
  virtual void DrawSample(RngStream& rng) = 0;
  virtual int64_t sample_count() const = 0;

  // g_i^t(x): mean of l(x; ξ_k).
  virtual void ErmG(const Vector& x, Eigen::Ref<Vector> out) const = 0;
  // ∇g_i^t(x), n_i × r.
  virtual void ErmJacobianT(const Vector& x, Eigen::Ref<Matrix> out) const = 0;
  // ∇_x f_i^t(x, y): mean of ∇_x h(x, y; φ_k).
  virtual void ErmGradFx(const Vector& x, const Vector& y,
                         Eigen::Ref<Vector> out) const = 0;
  // ∇_y f_i^t(x, y): mean of ∇_y h(x, y; φ_k).
  virtual void ErmGradFy(const Vector& x, const Vector& y,
                         Eigen::Ref<Vector> out) const = 0;

  // Single-sample loss l(x; ξ_k).
  virtual Vector SampleL(const Vector& x, int64_t k) const = 0;
  // Single-sample gradients, for finite-difference checks.
  virtual double SampleH(const Vector& x, const Vector& y, int64_t k) const = 0;
  virtual Vector SampleGradHx(const Vector& x, const Vector& y,
                              int64_t k) const = 0;
  virtual Vector SampleGradHy(const Vector& x, const Vector& y,
                              int64_t k) const = 0;
  virtual Matrix SampleJacobianT(const Vector& x, int64_t k) const = 0;

  // Averaged h over the store (used for finite-difference checks of the ERM
  // gradients).
  double ErmH(const Vector& x, const Vector& y) const;

  // When the family has exact sufficient statistics the ERM queries use them;
  // disabling forces a full pass over the stored samples.
  virtual bool has_fast_path() const { return false; }
  virtual void set_fast_path(bool enabled) { (void)enabled; }

  virtual std::unique_ptr<LocalOracle> Clone() const = 0;
};

// A problem instance: dimensions, constraint box, per-agent oracles and,
// when available, the exact expected-value evaluators used for verification.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string family() const = 0;

  int num_agents() const { return static_cast<int>(block_dims_.size()); }
  const std::vector<int>& block_dims() const { return block_dims_; }
  int block_dim(int i) const { return block_dims_[i]; }
  int block_offset(int i) const { return offsets_[i]; }
  int total_dim() const { return total_dim_; }
  int aggregate_dim() const { return aggregate_dim_; }
  const Box& box() const { return box_; }

  virtual std::unique_ptr<LocalOracle> MakeOracle(int agent) const = 0;

  // Exact expectations for agent i.
  virtual Vector ExpectedG(int i, const Vector& xi) const = 0;
  virtual Matrix ExpectedJacobianT(int i, const Vector& xi) const = 0;
  virtual Vector ExpectedGradFx(int i, const Vector& xi,
                                const Vector& y) const = 0;
  virtual Vector ExpectedGradFy(int i, const Vector& xi,
                                const Vector& y) const = 0;

  // g(x) for stacked x = col(x_1, ..., x_m).
  Vector Aggregate(const Vector& x) const;
  // F(x) = Σ_i f_i(x_i, g(x)), up to an additive constant fixed per instance.
  virtual double Objective(const Vector& x) const = 0;
  // ∇F(x) = col(∇_x f_i + ∇g_i · (1/m) Σ_j ∇_y f_j), evaluated at y = g(x).
  Vector Gradient(const Vector& x) const;

  // Minimizer and optimal value, when the instance certifies one.
  const std::optional<Vector>& optimum() const { return optimum_; }
  std::optional<double> optimal_value() const;

  const std::optional<VarianceConstants>& variance_constants() const {
    return variance_;
  }

 protected:
  void SetDimensions(std::vector<int> block_dims, int aggregate_dim, Box box);

  std::optional<Vector> optimum_;
  std::optional<VarianceConstants> variance_;

 private:
  std::vector<int> block_dims_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
  int aggregate_dim_ = 0;
  Box box_;
};

struct CentralizedResult {
  Vector x;
  int64_t iterations = 0;
  double last_step_norm = 0.0;
  bool converged = false;
};

// Projected gradient on the exact objective, x ← Π(x − step ∇F(x)), run until
// ‖Δx‖ < tol. Used to certify x* for instances without a closed form.
CentralizedResult SolveCentralized(const Problem& problem, const Vector& x0,
                                   double step, double tol = 1e-12,
                                   int64_t max_iterations = 10'000'000);

// ---------------------------------------------------------------------------
// Quadratic family with a known optimum:
//   h(x, y; φ) = (κ/2)‖x − c_i − φ‖² + (γ/2)‖y − d_i‖²,
//   l(x; ξ)    = A_i x + b_i + ξ,
// with φ ~ N(0, phi_std² I) and ξ ~ N(0, xi_std² I). κ = 1 gives a strongly
// convex F; κ = 0 with r < n leaves F convex but not strongly convex.
struct QuadraticAgentData {
  Matrix a;  // r × n_i
  Vector b;  // r
  Vector c;  // n_i
  Vector d;  // r
};

struct QuadraticSpec {
  int num_agents = 5;
  std::vector<int> block_dims;  // n_i; broadcast when size 1
  int aggregate_dim = 2;        // r
  double gamma = 1.0;
  double x_weight = 1.0;  // κ
  double xi_std = 0.5;
  double phi_std = 0.5;
  double a_scale = 0.5;
  double box_lo = -10.0;
  double box_hi = 10.0;
  uint64_t seed = 7;
  bool fast_path = true;
  // Explicit per-agent data; generated from `seed` when empty.
  std::vector<QuadraticAgentData> agents;
};

class QuadraticProblem final : public Problem {
 public:
  // Throws std::invalid_argument on γ < 0, κ < 0 or bad dimensions.
  explicit QuadraticProblem(QuadraticSpec spec);

  std::string family() const override { return "quadratic"; }
  const QuadraticSpec& spec() const { return spec_; }
  const QuadraticAgentData& agent(int i) const { return spec_.agents[i]; }

  std::unique_ptr<LocalOracle> MakeOracle(int agent) const override;
  Vector ExpectedG(int i, const Vector& xi) const override;
  Matrix ExpectedJacobianT(int i, const Vector& xi) const override;
  Vector ExpectedGradFx(int i, const Vector& xi, const Vector& y) const override;
  Vector ExpectedGradFy(int i, const Vector& xi, const Vector& y) const override;
  double Objective(const Vector& x) const override;

  // Upper bound on the Lipschitz constant of ∇F.
  double GradientLipschitz() const;

 private:
  QuadraticSpec spec_;
};

// ---------------------------------------------------------------------------
// Personalized learning family with a scalar aggregate (r = 1):
//   h(x, G; ξ) = L(x; ξ) + λ (L(x; ξ) − G)²,   l(x; ξ) = L(x; ξ),
// where L is the softmax cross-entropy of a linear model (one weight row per
// class over features plus a bias) with an optional ridge term (μ/2)‖x‖².
// Each agent holds a finite synthetic dataset of Gaussian class clusters; a
// fraction `major_share` of it comes from classes i and 2i (mod K). Samples
// are drawn uniformly with replacement, so the exact expectations are
// dataset averages.
struct PersonalizedSpec {
  int num_agents = 5;
  int classes = 3;
  int features = 2;
  double lambda = 0.5;
  double l2 = 0.01;
  int samples_per_agent = 100;
  double major_share = 0.6;
  double cluster_std = 1.0;
  double separation = 1.5;
  double box_lo = -1e6;
  double box_hi = 1e6;
  bool identical_agents = false;
  uint64_t seed = 11;
  bool fast_path = true;
};

struct LabeledPoint {
  Vector features;  // includes the trailing bias feature 1
  int label = 0;
};

class PersonalizedProblem final : public Problem {
 public:
  // Throws std::invalid_argument on λ < 0 or bad sizes.
  explicit PersonalizedProblem(PersonalizedSpec spec);

  std::string family() const override { return "personalized"; }
  const PersonalizedSpec& spec() const { return spec_; }
  const std::vector<LabeledPoint>& dataset(int i) const { return data_[i]; }

  std::unique_ptr<LocalOracle> MakeOracle(int agent) const override;
  Vector ExpectedG(int i, const Vector& xi) const override;
  Matrix ExpectedJacobianT(int i, const Vector& xi) const override;
  Vector ExpectedGradFx(int i, const Vector& xi, const Vector& y) const override;
  Vector ExpectedGradFy(int i, const Vector& xi, const Vector& y) const override;
  double Objective(const Vector& x) const override;

 private:
  PersonalizedSpec spec_;
  std::vector<std::vector<LabeledPoint>> data_;
};

// Loss and gradient of the linear softmax model with ridge term.
double SoftmaxLoss(const Vector& x, const LabeledPoint& point, int classes,
                   double l2, Vector* grad);

}  // namespace ldpagg

#endif  // LDPAGG_PROBLEMS_H_
