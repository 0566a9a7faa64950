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

#include "ldpagg/privacy.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ldpagg {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Σ_{t=1}^{T} a/(t+1)^p.
double PowerSum(double a, double p, int64_t horizon) {
  double sum = 0.0;
  for (int64_t t = 1; t <= horizon; ++t) {
    sum += a / std::pow(static_cast<double>(t) + 1.0, p);
  }
  return sum;
}

// Bound on Σ_{t≥1} a/(t+1)^{1+gap}: ∫_1^∞ a s^{-(1+gap)} ds = a/gap.
double TailBound(double a, double gap) {
  if (!(gap > 0.0)) return INFINITY;
  return a / gap;
}

}  // namespace

void SensitivityParams::Validate() const {
  for (double c : {oracle.lip_l, oracle.lip_h, oracle.lip_grad_l,
                   oracle.lip_grad_h, oracle.bound_l, oracle.bound_z}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("oracle constants must be finite and >= 0");
    }
  }
  if (!(w_bar > 0.0 && w_bar <= 1.0)) {
    throw std::invalid_argument("w_bar must lie in (0, 1]");
  }
  if (block_dim < 1 || aggregate_dim < 1) {
    throw std::invalid_argument("dimensions must be positive");
  }
  for (const StepsizeSchedule* s : {&lambda_x, &lambda_y, &lambda_z}) {
    if (!(s->lambda0 > 0.0)) {
      throw std::invalid_argument("initial stepsizes must be positive");
    }
  }
}

SensitivityParams MakeSensitivityParams(const OracleConstants& oracle,
                                        double w_bar, int block_dim,
                                        int aggregate_dim,
                                        const ScheduleSet& schedules) {
  SensitivityParams p;
  p.oracle = oracle;
  p.w_bar = w_bar;
  p.block_dim = block_dim;
  p.aggregate_dim = aggregate_dim;
  p.lambda_x = schedules.lambda_x;
  p.lambda_y = schedules.lambda_y;
  p.lambda_z = schedules.lambda_z;
  return p;
}

SensitivityTriple SensitivityStep(const SensitivityTriple& d, int64_t t,
                                  const SensitivityParams& p) {
  const OracleConstants& o = p.oracle;
  const double sr = std::sqrt(static_cast<double>(p.aggregate_dim));
  const double sn = std::sqrt(static_cast<double>(p.block_dim));
  const double lx = p.lambda_x.At(t);
  const double ly = p.lambda_y.At(t);
  const double lz = p.lambda_z.At(t);
  const double inv_t1 = 1.0 / (static_cast<double>(t) + 1.0);
  const double keep = 1.0 - p.w_bar;

  SensitivityTriple n;
  n.y = keep * d.y + o.lip_l * sr * ly * d.x + 2.0 * o.bound_l * ly * inv_t1;
  n.z = keep * d.z + sr * o.lip_grad_h * lz * d.x +
        (sr * o.lip_grad_h * lz / ly) * (n.y + d.y) +
        2.0 * sr * o.lip_h * lz * inv_t1;
  n.x = (keep + sn * o.lip_grad_h * lx + sn * o.lip_grad_l * o.bound_z * lx / lz) *
            d.x +
        (sn * o.lip_grad_h * lx / ly) * (n.y + d.y) +
        (sn * o.lip_l * lx / lz) * (n.z + d.z) + 2.0 * sn * o.lip_h * lx * inv_t1 +
        2.0 * sn * o.bound_z * o.lip_l * lx / lz * inv_t1;
  return n;
}

ContractionCoefficients Contraction(int64_t t, const SensitivityParams& p) {
  const OracleConstants& o = p.oracle;
  const double sn = std::sqrt(static_cast<double>(p.block_dim));
  const double lx = p.lambda_x.At(t);
  const double lz = p.lambda_z.At(t);
  ContractionCoefficients c;
  c.y = 1.0 - p.w_bar;
  c.z = 1.0 - p.w_bar;
  c.x = 1.0 - p.w_bar + sn * o.lip_grad_h * lx +
        sn * o.lip_grad_l * o.bound_z * lx / lz;
  return c;
}

SensitivityTrajectory RunSensitivityRecursion(const SensitivityParams& params,
                                              int64_t horizon) {
  params.Validate();
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  SensitivityTrajectory out;
  out.delta.reserve(static_cast<size_t>(horizon) + 1);
  out.delta.push_back({});
  for (int64_t t = 0; t < horizon; ++t) {
    const bool ok = Contraction(t, params).contracting();
    if (ok && !out.first_contracting) out.first_contracting = t;
    if (!ok && !out.first_violation) out.first_violation = t;
    out.delta.push_back(SensitivityStep(out.delta.back(), t, params));
  }
  return out;
}

SensitivityTriple EnvelopeExponents(const SensitivityParams& p) {
  return {1.0 + p.lambda_x.v - p.lambda_z.v, 1.0 + p.lambda_y.v,
          1.0 + p.lambda_z.v};
}

ClosedFormConstants ComputeClosedFormConstants(const SensitivityParams& p) {
  p.Validate();
  const double vx = p.lambda_x.v;
  const double vy = p.lambda_y.v;
  const double vz = p.lambda_z.v;
  if (!(1.0 > vx && vx > vz && vz > vy && vy > 0.0)) {
    throw std::invalid_argument(
        "closed-form constants need 1 > v_x > v_z > v_y > 0");
  }
  const OracleConstants& o = p.oracle;
  const double sr = std::sqrt(static_cast<double>(p.aggregate_dim));
  const double sn = std::sqrt(static_cast<double>(p.block_dim));
  const double lx0 = p.lambda_x.lambda0;
  const double ly0 = p.lambda_y.lambda0;
  const double lz0 = p.lambda_z.lambda0;
  const double wb = p.w_bar;
  const double e = std::numbers::e;
  const double log4 = std::log(4.0 / (4.0 - wb));
  const double log2 = std::log(2.0 / (2.0 - wb));

  ClosedFormConstants c;
  c.c0 = 2.0 * (o.bound_l * ly0 + sn * lx0 * (o.lip_h + o.bound_z * o.lip_l / lz0) +
                sr * o.lip_h * lz0);
  const double p1 = std::min(1.0 + vx - vz, 1.0 + vy);
  c.c1 = 4.0 * c.c0 / wb * std::pow(4.0 * p1 / (e * log4), p1);
  c.c2 = (c.c1 * o.lip_l * sr + 2.0 * o.bound_l) * ly0;
  c.cy = 2.0 * c.c2 / wb * std::pow(4.0 * (1.0 + vy) / (e * log2), 1.0 + vy);
  c.c3 = 2.0 * c.cy * sn * o.lip_grad_h * lx0 / ly0 +
         2.0 * (c.c1 + o.bound_z) * sr * o.lip_l * lx0 / lz0 +
         2.0 * sn * o.lip_h * lx0;
  const double px = 1.0 + vx - vz;
  c.cx = 4.0 * c.c3 / wb * std::pow(4.0 * px / (e * log4), px);
  c.c4 = c.cx * sr * o.lip_grad_h * lz0 +
         2.0 * c.cy * sr * o.lip_grad_h * lz0 / ly0 + 2.0 * sr * o.lip_h * lz0;
  c.cz = 2.0 * c.c4 / wb * std::pow(4.0 * (1.0 + vz) / (e * log2), 1.0 + vz);
  return c;
}

std::string_view ToString(DeltaSource s) {
  return s == DeltaSource::kRecursion ? "recursion" : "closedform";
}

std::optional<DeltaSource> ParseDeltaSource(std::string_view s) {
  if (s == "recursion") return DeltaSource::kRecursion;
  if (s == "closedform" || s == "closed_form") return DeltaSource::kClosedForm;
  return std::nullopt;
}

AgentNoise NoiseOf(const ScheduleSet& schedules, int agent) {
  return {schedules.noise_x.at(agent), schedules.noise_y.at(agent),
          schedules.noise_z.at(agent)};
}

AgentBudget ComputeBudget(const SensitivityParams& params,
                          const AgentNoise& noise,
                          std::optional<int64_t> horizon, DeltaSource source) {
  params.Validate();
  const SensitivityTriple pw = EnvelopeExponents(params);
  AgentBudget b;

  const bool have_closed_form =
      params.lambda_x.v > params.lambda_z.v &&
      params.lambda_z.v > params.lambda_y.v && params.lambda_y.v > 0.0 &&
      params.lambda_x.v < 1.0;
  if (have_closed_form) {
    const ClosedFormConstants c = ComputeClosedFormConstants(params);
    b.bound_inf_x = TailBound(kSqrt2 * c.cx / noise.x.sigma, pw.x - 1.0 - noise.x.varsigma);
    b.bound_inf_y = TailBound(kSqrt2 * c.cy / noise.y.sigma, pw.y - 1.0 - noise.y.varsigma);
    b.bound_inf_z = TailBound(kSqrt2 * c.cz / noise.z.sigma, pw.z - 1.0 - noise.z.varsigma);
    if (source == DeltaSource::kClosedForm && horizon) {
      b.eps_x = PowerSum(kSqrt2 * c.cx / noise.x.sigma, pw.x - noise.x.varsigma, *horizon);
      b.eps_y = PowerSum(kSqrt2 * c.cy / noise.y.sigma, pw.y - noise.y.varsigma, *horizon);
      b.eps_z = PowerSum(kSqrt2 * c.cz / noise.z.sigma, pw.z - noise.z.varsigma, *horizon);
    }
  } else {
    b.bound_inf_x = b.bound_inf_y = b.bound_inf_z = INFINITY;
    if (source == DeltaSource::kClosedForm && horizon) {
      throw std::invalid_argument(
          "closed-form budget needs 1 > v_x > v_z > v_y > 0");
    }
  }

  if (!horizon) {
    b.eps_x = b.bound_inf_x;
    b.eps_y = b.bound_inf_y;
    b.eps_z = b.bound_inf_z;
    return b;
  }
  if (source == DeltaSource::kRecursion) {
    const SensitivityTrajectory traj = RunSensitivityRecursion(params, *horizon);
    for (int64_t t = 1; t <= *horizon; ++t) {
      const SensitivityTriple& d = traj.delta[t];
      b.eps_x += d.x / noise.x.LaplaceScale(t);
      b.eps_y += d.y / noise.y.LaplaceScale(t);
      b.eps_z += d.z / noise.z.LaplaceScale(t);
    }
  }
  return b;
}

std::vector<double> CumulativeBudget(const SensitivityParams& params,
                                     const AgentNoise& noise, int64_t horizon) {
  const SensitivityTrajectory traj = RunSensitivityRecursion(params, horizon);
  std::vector<double> out(static_cast<size_t>(horizon) + 1, 0.0);
  for (int64_t t = 1; t <= horizon; ++t) {
    const SensitivityTriple& d = traj.delta[t];
    out[t] = out[t - 1] + d.x / noise.x.LaplaceScale(t) +
             d.y / noise.y.LaplaceScale(t) + d.z / noise.z.LaplaceScale(t);
  }
  return out;
}

CalibratedNoise CalibrateNoise(double epsilon, const SensitivityParams& params,
                               const AgentNoise& noise) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("target budget must be positive and finite");
  }
  const double gap_x = params.lambda_x.v - params.lambda_z.v - noise.x.varsigma;
  const double gap_y = params.lambda_y.v - noise.y.varsigma;
  const double gap_z = params.lambda_z.v - noise.z.varsigma;
  if (!(gap_x > 0.0) || !(gap_y > 0.0) || !(gap_z > 0.0)) {
    throw std::invalid_argument(
        "noise decay exponents leave a non-positive gap; no finite "
        "infinite-horizon budget exists");
  }
  const ClosedFormConstants c = ComputeClosedFormConstants(params);
  const double k = 3.0 * kSqrt2;
  return {k * c.cx / (gap_x * epsilon), k * c.cy / (gap_y * epsilon),
          k * c.cz / (gap_z * epsilon)};
}

std::string BoundAudit::ToString() const {
  std::ostringstream out;
  for (const auto& a : agents) {
    out << "agent " << a.agent << ": max|z| " << a.max_z_norm
        << (a.z_within ? " ok" : " EXCEEDS d_z") << ", max|l|_1 " << a.max_l1
        << (a.l_within ? " ok" : " EXCEEDS d_l") << "\n";
  }
  out << (sound ? "bounds hold" : "bounds violated: budget unsound") << "\n";
  return out.str();
}

BoundAudit EmpiricalBoundCheck(const std::vector<TrajectoryExtremes>& run,
                               const OracleConstants& oracle) {
  BoundAudit audit;
  audit.sound = true;
  for (size_t i = 0; i < run.size(); ++i) {
    BoundAuditEntry e;
    e.agent = static_cast<int>(i);
    e.max_z_norm = run[i].max_z_norm;
    e.max_l1 = run[i].max_l1;
    e.z_within = e.max_z_norm <= oracle.bound_z;
    e.l_within = e.max_l1 <= oracle.bound_l;
    audit.sound = audit.sound && e.z_within && e.l_within;
    audit.tightest_bound_z = std::max(audit.tightest_bound_z, e.max_z_norm);
    audit.tightest_bound_l = std::max(audit.tightest_bound_l, e.max_l1);
    audit.agents.push_back(e);
  }
  return audit;
}

}  // namespace ldpagg
