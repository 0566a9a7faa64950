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

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ldpagg {
namespace {

double MaxVarsigma(const std::vector<NoiseSchedule>& v) {
  double out = -INFINITY;
  for (const auto& s : v) out = std::max(out, s.varsigma);
  return out;
}

double MinVarsigma(const std::vector<NoiseSchedule>& v) {
  double out = INFINITY;
  for (const auto& s : v) out = std::min(out, s.varsigma);
  return out;
}

}  // namespace

std::string_view ToString(ConvexityCase c) {
  switch (c) {
    case ConvexityCase::kStronglyConvex:
      return "sc";
    case ConvexityCase::kConvex:
      return "cvx";
    case ConvexityCase::kNonconvex:
      return "ncvx";
  }
  return "?";
}

std::optional<ConvexityCase> ParseConvexityCase(std::string_view s) {
  if (s == "sc") return ConvexityCase::kStronglyConvex;
  if (s == "cvx") return ConvexityCase::kConvex;
  if (s == "ncvx") return ConvexityCase::kNonconvex;
  return std::nullopt;
}

Exponents ScheduleSet::MinExponents() const {
  return {lambda_x.v,           lambda_y.v,           lambda_z.v,
          MinVarsigma(noise_x), MinVarsigma(noise_y), MinVarsigma(noise_z)};
}

void ScheduleSet::ValidateStructure() const {
  for (const StepsizeSchedule* s : {&lambda_x, &lambda_y, &lambda_z}) {
    if (!(s->lambda0 > 0.0)) {
      throw std::invalid_argument("initial stepsize must be positive");
    }
    if (!(s->v > 0.0 && s->v < 1.0)) {
      throw std::invalid_argument("stepsize decay exponent must lie in (0, 1)");
    }
  }
  const size_t m = noise_x.size();
  if (m == 0 || noise_y.size() != m || noise_z.size() != m) {
    throw std::invalid_argument("noise schedules need one entry per agent");
  }
  for (const auto* list : {&noise_x, &noise_y, &noise_z}) {
    for (const auto& s : *list) {
      if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
        throw std::invalid_argument("noise sigma must be positive and finite");
      }
      if (!(s.varsigma >= 0.0) || !std::isfinite(s.varsigma)) {
        throw std::invalid_argument("noise decay exponent must be >= 0");
      }
    }
  }
}

ScheduleSet UniformScheduleSet(const Exponents& e, int num_agents,
                               double lambda0_x, double lambda0_y,
                               double lambda0_z, double sigma_x, double sigma_y,
                               double sigma_z) {
  ScheduleSet s;
  s.lambda_x = {lambda0_x, e.v_x};
  s.lambda_y = {lambda0_y, e.v_y};
  s.lambda_z = {lambda0_z, e.v_z};
  s.noise_x.assign(num_agents, {sigma_x, e.varsigma_x});
  s.noise_y.assign(num_agents, {sigma_y, e.varsigma_y});
  s.noise_z.assign(num_agents, {sigma_z, e.varsigma_z});
  return s;
}

std::vector<std::string> ConditionReport::Failures() const {
  std::vector<std::string> out;
  for (const auto& c : conditions) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

std::string ConditionReport::ToString() const {
  std::ostringstream out;
  for (const auto& c : conditions) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.lhs << " > "
        << c.rhs << "\n";
  }
  if (rate_exponent) out << "rate exponent " << *rate_exponent << "\n";
  return out.str();
}

ConditionReport CheckConditions(const ScheduleSet& s, ConvexityCase convexity) {
  ConditionReport report;
  auto require = [&report](std::string name, double lhs, double rhs) {
    report.conditions.push_back({std::move(name), lhs, rhs, lhs > rhs});
  };
  const double vx = s.lambda_x.v;
  const double vy = s.lambda_y.v;
  const double vz = s.lambda_z.v;

  require("1 > v_x", 1.0, vx);
  require("v_x > v_z", vx, vz);
  require("1/2 > v_z", 0.5, vz);
  require("v_z > v_y", vz, vy);
  require("v_y > 0", vy, 0.0);

  require("v_x - v_z > max_i varsigma_{i,x}", vx - vz, MaxVarsigma(s.noise_x));
  require("v_y > max_i varsigma_{i,y}", vy, MaxVarsigma(s.noise_y));
  require("v_z > max_i varsigma_{i,z}", vz, MaxVarsigma(s.noise_z));

  const double sx = MinVarsigma(s.noise_x);
  const double sy = MinVarsigma(s.noise_y);
  const double sz = MinVarsigma(s.noise_z);
  if (convexity == ConvexityCase::kStronglyConvex) {
    require("varsigma_x > max{v_z - varsigma_z, v_y - varsigma_y, v_x/2}", sx,
            std::max({vz - sz, vy - sy, vx / 2.0}));
    require("varsigma_y > v_y - 1/2", sy, vy - 0.5);
    require("varsigma_z > v_z - 1/2", sz, vz - 0.5);
  } else {
    require("varsigma_x > 1/2", sx, 0.5);
    require("varsigma_y > v_y - 1/2 + (1 - v_x)", sy, vy - 0.5 + (1.0 - vx));
    require("varsigma_z > v_z - 1/2 + (1 - v_x)", sz, vz - 0.5 + (1.0 - vx));
  }

  report.all_pass =
      std::all_of(report.conditions.begin(), report.conditions.end(),
                  [](const Condition& c) { return c.pass; });
  if (report.all_pass) {
    if (convexity == ConvexityCase::kStronglyConvex) {
      report.rate_exponent =
          std::min({2.0 * sx - vx, 0.5 - vy + sy, 0.5 - vz + sz});
    } else {
      report.rate_exponent = 1.0 - vx;
    }
  }
  return report;
}

Exponents RatePreset(ConvexityCase convexity, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  Exponents e;
  if (convexity == ConvexityCase::kStronglyConvex) {
    e.v_x = 0.5 + 7.0 * delta;
    e.varsigma_x = 0.5 + 3.0 * delta;
  } else {
    e.v_x = 0.5 + 5.0 * delta;
    e.varsigma_x = 0.5 + delta;
  }
  e.v_z = 3.0 * delta;
  e.v_y = 2.0 * delta;
  e.varsigma_y = delta;
  e.varsigma_z = 2.0 * delta;

  const ConditionReport report = CheckConditions(
      UniformScheduleSet(e, 1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0), convexity);
  if (!report.all_pass) {
    std::string msg = "delta yields an invalid schedule; failed:";
    for (const auto& f : report.Failures()) msg += " [" + f + "]";
    throw std::invalid_argument(msg);
  }
  return e;
}

double SampleLaplace(RngStream& rng, double nu) {
  const double u = rng.UniformOpen() - 0.5;
  const double mag = -nu * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

void SampleLaplace(RngStream& rng, double nu, std::span<double> out) {
  for (double& v : out) v = SampleLaplace(rng, nu);
}

Vector SampleLaplace(RngStream& rng, double nu, int dim) {
  Vector out(dim);
  SampleLaplace(rng, nu, std::span<double>(out.data(), out.size()));
  return out;
}

}  // namespace ldpagg
