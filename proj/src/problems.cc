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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldpagg {

// ---------------------------------------------------------------------------
// Box

Box Box::Uniform(int dim, double lo, double hi) {
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

void Box::Validate() const {
  if (lo.size() != hi.size()) {
    throw std::invalid_argument("box bounds have different sizes");
  }
  for (int k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo(k)) || !std::isfinite(hi(k))) {
      throw std::invalid_argument("box bounds must be finite");
    }
    if (lo(k) > hi(k)) {
      throw std::invalid_argument("inverted box bounds at coordinate " +
                                  std::to_string(k));
    }
  }
}

bool Box::Contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (int k = 0; k < x.size(); ++k) {
    if (!(x(k) >= lo(k) - tol && x(k) <= hi(k) + tol)) return false;
  }
  return true;
}

void Box::Project(Eigen::Ref<Vector> x) const {
  for (int k = 0; k < x.size(); ++k) x(k) = std::clamp(x(k), lo(k), hi(k));
}

Box Box::Segment(int offset, int size) const {
  return {lo.segment(offset, size), hi.segment(offset, size)};
}

Vector ProjectBox(const Vector& x, const Box& box) {
  Vector out = x;
  box.Project(out);
  return out;
}

// ---------------------------------------------------------------------------
// LocalOracle / Problem

double LocalOracle::ErmH(const Vector& x, const Vector& y) const {
  const int64_t n = sample_count();
  if (n <= 0) throw std::logic_error("ERM query on an empty sample store");
  double sum = 0.0;
  for (int64_t k = 0; k < n; ++k) sum += SampleH(x, y, k);
  return sum / static_cast<double>(n);
}

void Problem::SetDimensions(std::vector<int> block_dims, int aggregate_dim,
                            Box box) {
  block_dims_ = std::move(block_dims);
  offsets_.resize(block_dims_.size());
  total_dim_ = 0;
  for (size_t i = 0; i < block_dims_.size(); ++i) {
    offsets_[i] = total_dim_;
    total_dim_ += block_dims_[i];
  }
  aggregate_dim_ = aggregate_dim;
  box.Validate();
  if (box.dim() != total_dim_) {
    throw std::invalid_argument("box dimension does not match the problem");
  }
  box_ = std::move(box);
}

Vector Problem::Aggregate(const Vector& x) const {
  Vector g = Vector::Zero(aggregate_dim_);
  for (int i = 0; i < num_agents(); ++i) {
    g += ExpectedG(i, x.segment(block_offset(i), block_dim(i)));
  }
  return g / static_cast<double>(num_agents());
}

Vector Problem::Gradient(const Vector& x) const {
  const int m = num_agents();
  const Vector g = Aggregate(x);
  Vector mean_fy = Vector::Zero(aggregate_dim_);
  for (int j = 0; j < m; ++j) {
    mean_fy += ExpectedGradFy(j, x.segment(block_offset(j), block_dim(j)), g);
  }
  mean_fy /= static_cast<double>(m);
  Vector grad(total_dim_);
  for (int i = 0; i < m; ++i) {
    const Vector xi = x.segment(block_offset(i), block_dim(i));
    grad.segment(block_offset(i), block_dim(i)) =
        ExpectedGradFx(i, xi, g) + ExpectedJacobianT(i, xi) * mean_fy;
  }
  return grad;
}

std::optional<double> Problem::optimal_value() const {
  if (!optimum_) return std::nullopt;
  return Objective(*optimum_);
}

CentralizedResult SolveCentralized(const Problem& problem, const Vector& x0,
                                   double step, double tol,
                                   int64_t max_iterations) {
  CentralizedResult result;
  result.x = ProjectBox(x0, problem.box());
  Vector next(result.x.size());
  for (int64_t it = 0; it < max_iterations; ++it) {
    next = result.x - step * problem.Gradient(result.x);
    problem.box().Project(next);
    result.last_step_norm = (next - result.x).norm();
    result.x.swap(next);
    result.iterations = it + 1;
    if (result.last_step_norm < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Quadratic family

namespace {

class QuadraticOracle final : public LocalOracle {
 public:
  QuadraticOracle(const QuadraticAgentData& data, double gamma, double kappa,
                  double xi_std, double phi_std, bool fast_path)
      : data_(data),
        gamma_(gamma),
        kappa_(kappa),
        xi_std_(xi_std),
        phi_std_(phi_std),
        fast_path_(fast_path),
        xi_sum_(Vector::Zero(data.a.rows())),
        phi_sum_(Vector::Zero(data.a.cols())) {}

  int block_dim() const override { return static_cast<int>(data_.a.cols()); }
  int aggregate_dim() const override { return static_cast<int>(data_.a.rows()); }

  void DrawSample(RngStream& rng) override {
    const int r = aggregate_dim();
    const int n = block_dim();
    for (int k = 0; k < r; ++k) {
      const double v = xi_std_ * rng.Normal();
      xi_.push_back(v);
      xi_sum_(k) += v;
    }
    for (int k = 0; k < n; ++k) {
      const double v = phi_std_ * rng.Normal();
      phi_.push_back(v);
      phi_sum_(k) += v;
    }
    ++count_;
  }

  int64_t sample_count() const override { return count_; }

  void ErmG(const Vector& x, Eigen::Ref<Vector> out) const override {
    RequireSamples();
    const double inv = 1.0 / static_cast<double>(count_);
    if (fast_path_) {
      out.noalias() = data_.a * x;
      out += data_.b + inv * xi_sum_;
      return;
    }
    out.setZero();
    for (int64_t k = 0; k < count_; ++k) out += SampleL(x, k);
    out *= inv;
  }

  void ErmJacobianT(const Vector& x, Eigen::Ref<Matrix> out) const override {
    (void)x;
    RequireSamples();
    out = data_.a.transpose();
  }

  void ErmGradFx(const Vector& x, const Vector& y,
                 Eigen::Ref<Vector> out) const override {
    RequireSamples();
    const double inv = 1.0 / static_cast<double>(count_);
    if (fast_path_) {
      out = kappa_ * (x - data_.c - inv * phi_sum_);
      return;
    }
    out.setZero();
    for (int64_t k = 0; k < count_; ++k) out += SampleGradHx(x, y, k);
    out *= inv;
  }

  void ErmGradFy(const Vector& x, const Vector& y,
                 Eigen::Ref<Vector> out) const override {
    (void)x;
    RequireSamples();
    out = gamma_ * (y - data_.d);
  }

  Vector SampleL(const Vector& x, int64_t k) const override {
    return data_.a * x + data_.b + Xi(k);
  }
  double SampleH(const Vector& x, const Vector& y, int64_t k) const override {
    return 0.5 * kappa_ * (x - data_.c - Phi(k)).squaredNorm() +
           0.5 * gamma_ * (y - data_.d).squaredNorm();
  }
  Vector SampleGradHx(const Vector& x, const Vector& y,
                      int64_t k) const override {
    (void)y;
    return kappa_ * (x - data_.c - Phi(k));
  }
  Vector SampleGradHy(const Vector& x, const Vector& y,
                      int64_t k) const override {
    (void)x;
    (void)k;
    return gamma_ * (y - data_.d);
  }
  Matrix SampleJacobianT(const Vector& x, int64_t k) const override {
    (void)x;
    (void)k;
    return data_.a.transpose();
  }

  bool has_fast_path() const override { return true; }
  void set_fast_path(bool enabled) override { fast_path_ = enabled; }

  std::unique_ptr<LocalOracle> Clone() const override {
    return std::make_unique<QuadraticOracle>(*this);
  }

 private:
  void RequireSamples() const {
    if (count_ <= 0) throw std::logic_error("ERM query on an empty sample store");
  }
  Eigen::Map<const Vector> Xi(int64_t k) const {
    return {xi_.data() + k * aggregate_dim(), aggregate_dim()};
  }
  Eigen::Map<const Vector> Phi(int64_t k) const {
    return {phi_.data() + k * block_dim(), block_dim()};
  }

  const QuadraticAgentData& data_;
  double gamma_;
  double kappa_;
  double xi_std_;
  double phi_std_;
  bool fast_path_;
  int64_t count_ = 0;
  std::vector<double> xi_;
  std::vector<double> phi_;
  Vector xi_sum_;
  Vector phi_sum_;
};

}  // namespace

QuadraticProblem::QuadraticProblem(QuadraticSpec spec) : spec_(std::move(spec)) {
  const int m = spec_.num_agents;
  if (m < 1) throw std::invalid_argument("need at least one agent");
  if (spec_.gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (spec_.x_weight < 0.0) throw std::invalid_argument("x_weight must be >= 0");
  if (spec_.xi_std < 0.0 || spec_.phi_std < 0.0) {
    throw std::invalid_argument("data noise standard deviations must be >= 0");
  }
  if (spec_.aggregate_dim < 1) throw std::invalid_argument("r must be >= 1");

  std::vector<int> dims = spec_.block_dims;
  if (!spec_.agents.empty()) {
    if (static_cast<int>(spec_.agents.size()) != m) {
      throw std::invalid_argument("explicit agent data must list every agent");
    }
    dims.clear();
    for (const auto& a : spec_.agents) dims.push_back(static_cast<int>(a.a.cols()));
  }
  if (dims.empty()) dims = {2};
  if (dims.size() == 1) dims.assign(m, dims[0]);
  if (static_cast<int>(dims.size()) != m) {
    throw std::invalid_argument("block_dims must have one entry per agent");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("block dimensions must be >= 1");
  }
  spec_.block_dims = dims;
  const int r = spec_.aggregate_dim;

  if (spec_.agents.empty()) {
    RngStream rng(Mix64(spec_.seed ^ 0x9a0b1c2dULL));
    for (int i = 0; i < m; ++i) {
      QuadraticAgentData a;
      a.a.resize(r, dims[i]);
      for (int row = 0; row < r; ++row) {
        for (int col = 0; col < dims[i]; ++col) {
          a.a(row, col) = spec_.a_scale * rng.Normal();
        }
      }
      a.b.resize(r);
      for (int k = 0; k < r; ++k) a.b(k) = rng.Normal();
      a.c.resize(dims[i]);
      for (int k = 0; k < dims[i]; ++k) a.c(k) = rng.Normal();
      a.d.resize(r);
      for (int k = 0; k < r; ++k) a.d(k) = rng.Normal();
      spec_.agents.push_back(std::move(a));
    }
  }
  for (const auto& a : spec_.agents) {
    if (a.a.rows() != r || a.b.size() != r || a.d.size() != r ||
        a.c.size() != a.a.cols()) {
      throw std::invalid_argument("inconsistent quadratic agent data");
    }
  }

  int n = 0;
  for (int d : dims) n += d;
  SetDimensions(dims, r, Box::Uniform(n, spec_.box_lo, spec_.box_hi));

  variance_ = VarianceConstants{
      r * spec_.xi_std * spec_.xi_std, 0.0,
      spec_.x_weight * spec_.x_weight * spec_.phi_std * spec_.phi_std *
          static_cast<double>(*std::max_element(dims.begin(), dims.end()))};

  const CentralizedResult solved = SolveCentralized(
      *this, Vector::Zero(n), 1.0 / GradientLipschitz(), 1e-12, 10'000'000);
  optimum_ = solved.x;
}

double QuadraticProblem::GradientLipschitz() const {
  const int m = num_agents();
  Matrix stacked(aggregate_dim(), total_dim());
  for (int i = 0; i < m; ++i) {
    stacked.middleCols(block_offset(i), block_dim(i)) = spec_.agents[i].a;
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const double s = svd.singularValues()(0);
  return spec_.x_weight + spec_.gamma * s * s / static_cast<double>(m) + 1e-12;
}

std::unique_ptr<LocalOracle> QuadraticProblem::MakeOracle(int agent) const {
  return std::make_unique<QuadraticOracle>(spec_.agents[agent], spec_.gamma,
                                           spec_.x_weight, spec_.xi_std,
                                           spec_.phi_std, spec_.fast_path);
}

Vector QuadraticProblem::ExpectedG(int i, const Vector& xi) const {
  return spec_.agents[i].a * xi + spec_.agents[i].b;
}

Matrix QuadraticProblem::ExpectedJacobianT(int i, const Vector& xi) const {
  (void)xi;
  return spec_.agents[i].a.transpose();
}

Vector QuadraticProblem::ExpectedGradFx(int i, const Vector& xi,
                                        const Vector& y) const {
  (void)y;
  return spec_.x_weight * (xi - spec_.agents[i].c);
}

Vector QuadraticProblem::ExpectedGradFy(int i, const Vector& xi,
                                        const Vector& y) const {
  (void)xi;
  return spec_.gamma * (y - spec_.agents[i].d);
}

double QuadraticProblem::Objective(const Vector& x) const {
  const Vector g = Aggregate(x);
  double f = 0.0;
  for (int i = 0; i < num_agents(); ++i) {
    const Vector xi = x.segment(block_offset(i), block_dim(i));
    f += 0.5 * spec_.x_weight * (xi - spec_.agents[i].c).squaredNorm() +
         0.5 * spec_.gamma * (g - spec_.agents[i].d).squaredNorm();
  }
  return f;
}

// ---------------------------------------------------------------------------
// Personalized family

double SoftmaxLoss(const Vector& x, const LabeledPoint& point, int classes,
                   double l2, Vector* grad) {
  const int width = static_cast<int>(point.features.size());
  double logits[64];
  double* z = logits;
  std::vector<double> heap;
  if (classes > 64) {
    heap.resize(classes);
    z = heap.data();
  }
  double zmax = -INFINITY;
  for (int k = 0; k < classes; ++k) {
    double s = 0.0;
    for (int f = 0; f < width; ++f) s += x(k * width + f) * point.features(f);
    z[k] = s;
    zmax = std::max(zmax, s);
  }
  double denom = 0.0;
  for (int k = 0; k < classes; ++k) {
    z[k] = std::exp(z[k] - zmax);
    denom += z[k];
  }
  const double loss = std::log(denom) + zmax -
                      (std::log(z[point.label]) + zmax) +
                      0.5 * l2 * x.squaredNorm();
  if (grad != nullptr) {
    grad->resize(x.size());
    for (int k = 0; k < classes; ++k) {
      const double coeff = z[k] / denom - (k == point.label ? 1.0 : 0.0);
      for (int f = 0; f < width; ++f) {
        (*grad)(k * width + f) = coeff * point.features(f) + l2 * x(k * width + f);
      }
    }
  }
  return loss;
}

namespace {

// Dataset moments at one point: E[L], E[∇L], E[L ∇L].
struct LossMoments {
  double mean_loss = 0.0;
  Vector mean_grad;
  Vector mean_loss_grad;
};

class PersonalizedOracle final : public LocalOracle {
 public:
  PersonalizedOracle(const std::vector<LabeledPoint>& data, int classes,
                     double lambda, double l2, bool fast_path)
      : data_(data),
        classes_(classes),
        lambda_(lambda),
        l2_(l2),
        fast_path_(fast_path),
        counts_(data.size(), 0) {}

  int block_dim() const override {
    return classes_ * static_cast<int>(data_.front().features.size());
  }
  int aggregate_dim() const override { return 1; }

  void DrawSample(RngStream& rng) override {
    const auto idx = static_cast<int32_t>(rng.Index(data_.size()));
    indices_.push_back(idx);
    ++counts_[idx];
    cache_valid_ = false;
  }

  int64_t sample_count() const override {
    return static_cast<int64_t>(indices_.size());
  }

  void ErmG(const Vector& x, Eigen::Ref<Vector> out) const override {
    out(0) = Moments(x).mean_loss;
  }
  void ErmJacobianT(const Vector& x, Eigen::Ref<Matrix> out) const override {
    out.col(0) = Moments(x).mean_grad;
  }
  void ErmGradFx(const Vector& x, const Vector& y,
                 Eigen::Ref<Vector> out) const override {
    // ∇_x h = ∇L (1 + 2λ(L − y)), averaged.
    const LossMoments& mo = Moments(x);
    out = mo.mean_grad + 2.0 * lambda_ * (mo.mean_loss_grad - y(0) * mo.mean_grad);
  }
  void ErmGradFy(const Vector& x, const Vector& y,
                 Eigen::Ref<Vector> out) const override {
    out(0) = -2.0 * lambda_ * (Moments(x).mean_loss - y(0));
  }

  Vector SampleL(const Vector& x, int64_t k) const override {
    return Vector::Constant(1, SoftmaxLoss(x, Point(k), classes_, l2_, nullptr));
  }
  double SampleH(const Vector& x, const Vector& y, int64_t k) const override {
    const double loss = SoftmaxLoss(x, Point(k), classes_, l2_, nullptr);
    return loss + lambda_ * (loss - y(0)) * (loss - y(0));
  }
  Vector SampleGradHx(const Vector& x, const Vector& y,
                      int64_t k) const override {
    Vector grad;
    const double loss = SoftmaxLoss(x, Point(k), classes_, l2_, &grad);
    return grad * (1.0 + 2.0 * lambda_ * (loss - y(0)));
  }
  Vector SampleGradHy(const Vector& x, const Vector& y,
                      int64_t k) const override {
    const double loss = SoftmaxLoss(x, Point(k), classes_, l2_, nullptr);
    return Vector::Constant(1, -2.0 * lambda_ * (loss - y(0)));
  }
  Matrix SampleJacobianT(const Vector& x, int64_t k) const override {
    Vector grad;
    SoftmaxLoss(x, Point(k), classes_, l2_, &grad);
    return grad;
  }

  bool has_fast_path() const override { return true; }
  void set_fast_path(bool enabled) override {
    fast_path_ = enabled;
    cache_valid_ = false;
  }

  std::unique_ptr<LocalOracle> Clone() const override {
    return std::make_unique<PersonalizedOracle>(*this);
  }

 private:
  const LabeledPoint& Point(int64_t k) const { return data_[indices_[k]]; }

  // Moments over the store, cached per (x, sample count).
  const LossMoments& Moments(const Vector& x) const {
    if (indices_.empty()) {
      throw std::logic_error("ERM query on an empty sample store");
    }
    if (cache_valid_ && cache_x_.size() == x.size() && cache_x_ == x) {
      return cache_;
    }
    const int n = static_cast<int>(x.size());
    cache_.mean_loss = 0.0;
    cache_.mean_grad = Vector::Zero(n);
    cache_.mean_loss_grad = Vector::Zero(n);
    grad_.resize(n);
    const double inv = 1.0 / static_cast<double>(indices_.size());
    if (fast_path_) {
      // Counts over the finite dataset are exact sufficient statistics.
      for (size_t j = 0; j < data_.size(); ++j) {
        if (counts_[j] == 0) continue;
        const double w = static_cast<double>(counts_[j]) * inv;
        const double loss = SoftmaxLoss(x, data_[j], classes_, l2_, &grad_);
        cache_.mean_loss += w * loss;
        cache_.mean_grad += w * grad_;
        cache_.mean_loss_grad += (w * loss) * grad_;
      }
    } else {
      for (int32_t idx : indices_) {
        const double loss = SoftmaxLoss(x, data_[idx], classes_, l2_, &grad_);
        cache_.mean_loss += loss;
        cache_.mean_grad += grad_;
        cache_.mean_loss_grad += loss * grad_;
      }
      cache_.mean_loss *= inv;
      cache_.mean_grad *= inv;
      cache_.mean_loss_grad *= inv;
    }
    cache_x_ = x;
    cache_valid_ = true;
    return cache_;
  }

  const std::vector<LabeledPoint>& data_;
  int classes_;
  double lambda_;
  double l2_;
  bool fast_path_;
  std::vector<int32_t> indices_;
  std::vector<int64_t> counts_;

  mutable bool cache_valid_ = false;
  mutable Vector cache_x_;
  mutable LossMoments cache_;
  mutable Vector grad_;
};

LossMoments DatasetMoments(const std::vector<LabeledPoint>& data, const Vector& x,
                           int classes, double l2) {
  LossMoments mo;
  mo.mean_grad = Vector::Zero(x.size());
  mo.mean_loss_grad = Vector::Zero(x.size());
  Vector grad;
  for (const auto& p : data) {
    const double loss = SoftmaxLoss(x, p, classes, l2, &grad);
    mo.mean_loss += loss;
    mo.mean_grad += grad;
    mo.mean_loss_grad += loss * grad;
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  mo.mean_loss *= inv;
  mo.mean_grad *= inv;
  mo.mean_loss_grad *= inv;
  return mo;
}

}  // namespace

PersonalizedProblem::PersonalizedProblem(PersonalizedSpec spec)
    : spec_(std::move(spec)) {
  const int m = spec_.num_agents;
  const int k_classes = spec_.classes;
  if (m < 1) throw std::invalid_argument("need at least one agent");
  if (spec_.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (spec_.l2 < 0.0) throw std::invalid_argument("l2 must be >= 0");
  if (k_classes < 2) throw std::invalid_argument("need at least two classes");
  if (spec_.features < 1) throw std::invalid_argument("need at least one feature");
  if (spec_.samples_per_agent < 1) {
    throw std::invalid_argument("samples_per_agent must be >= 1");
  }
  if (!(spec_.major_share >= 0.0 && spec_.major_share <= 1.0)) {
    throw std::invalid_argument("major_share must lie in [0, 1]");
  }

  const int width = spec_.features + 1;
  std::vector<Vector> means(k_classes, Vector::Zero(spec_.features));
  for (int k = 0; k < k_classes; ++k) {
    for (int f = 0; f < spec_.features; ++f) {
      means[k](f) = spec_.separation *
                    std::cos(2.0 * std::numbers::pi * k / k_classes +
                             0.5 * std::numbers::pi * f);
    }
  }

  RngStream rng(Mix64(spec_.seed ^ 0x7e450a11ULL));
  data_.resize(m);
  for (int i = 0; i < m; ++i) {
    if (spec_.identical_agents && i > 0) {
      data_[i] = data_[0];
      continue;
    }
    // Agent i (1-based) draws most of its data from classes i and 2i.
    std::vector<int> majors = {(i + 1) % k_classes, (2 * (i + 1)) % k_classes};
    if (majors[0] == majors[1]) majors.pop_back();
    std::vector<int> minors;
    for (int k = 0; k < k_classes; ++k) {
      if (std::find(majors.begin(), majors.end(), k) == majors.end()) {
        minors.push_back(k);
      }
    }
    if (minors.empty()) minors = majors;
    for (int s = 0; s < spec_.samples_per_agent; ++s) {
      LabeledPoint p;
      if (rng.UniformOpen() < spec_.major_share) {
        p.label = majors[rng.Index(majors.size())];
      } else {
        p.label = minors[rng.Index(minors.size())];
      }
      p.features.resize(width);
      for (int f = 0; f < spec_.features; ++f) {
        p.features(f) = means[p.label](f) + spec_.cluster_std * rng.Normal();
      }
      p.features(spec_.features) = 1.0;
      data_[i].push_back(std::move(p));
    }
  }

  const int n_i = k_classes * width;
  SetDimensions(std::vector<int>(m, n_i), 1,
                Box::Uniform(m * n_i, spec_.box_lo, spec_.box_hi));
}

std::unique_ptr<LocalOracle> PersonalizedProblem::MakeOracle(int agent) const {
  return std::make_unique<PersonalizedOracle>(data_[agent], spec_.classes,
                                              spec_.lambda, spec_.l2,
                                              spec_.fast_path);
}

Vector PersonalizedProblem::ExpectedG(int i, const Vector& xi) const {
  return Vector::Constant(
      1, DatasetMoments(data_[i], xi, spec_.classes, spec_.l2).mean_loss);
}

Matrix PersonalizedProblem::ExpectedJacobianT(int i, const Vector& xi) const {
  return DatasetMoments(data_[i], xi, spec_.classes, spec_.l2).mean_grad;
}

Vector PersonalizedProblem::ExpectedGradFx(int i, const Vector& xi,
                                           const Vector& y) const {
  const LossMoments mo = DatasetMoments(data_[i], xi, spec_.classes, spec_.l2);
  return mo.mean_grad + 2.0 * spec_.lambda * (mo.mean_loss_grad - y(0) * mo.mean_grad);
}

Vector PersonalizedProblem::ExpectedGradFy(int i, const Vector& xi,
                                           const Vector& y) const {
  const LossMoments mo = DatasetMoments(data_[i], xi, spec_.classes, spec_.l2);
  return Vector::Constant(1, -2.0 * spec_.lambda * (mo.mean_loss - y(0)));
}

double PersonalizedProblem::Objective(const Vector& x) const {
  const Vector g = Aggregate(x);
  double f = 0.0;
  for (int i = 0; i < num_agents(); ++i) {
    const Vector xi = x.segment(block_offset(i), block_dim(i));
    double sum = 0.0;
    for (const auto& p : data_[i]) {
      const double loss = SoftmaxLoss(xi, p, spec_.classes, spec_.l2, nullptr);
      sum += loss + spec_.lambda * (loss - g(0)) * (loss - g(0));
    }
    f += sum / static_cast<double>(data_[i].size());
  }
  return f;
}

}  // namespace ldpagg
