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

// JSON experiment configuration. Unknown keys are rejected and every error
// names the offending key as a JSON pointer. See README.md for the schema.

#ifndef LDPAGG_CONFIG_H_
#define LDPAGG_CONFIG_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldpagg/algorithm.h"
#include "ldpagg/privacy.h"
#include "ldpagg/problems.h"
#include "ldpagg/schedules.h"
#include "ldpagg/topology.h"

namespace ldpagg {

struct TopologySpec {
  enum class Kind { kRing, kMatrix, kTrivial };
  Kind kind = Kind::kRing;
  int m = 5;
  double w = 0.3;
  Matrix matrix;

  int num_agents() const;
};

struct RunConfig {
  std::string problem = "quadratic";
  QuadraticSpec quadratic;
  PersonalizedSpec personalized;
  TopologySpec topology;

  // "corollary1-sc", "corollary1-cvx" or "corollary1-ncvx"; fills any
  // exponent not given explicitly.
  std::optional<std::string> preset;
  double delta = 0.01;
  ConvexityCase convexity = ConvexityCase::kStronglyConvex;
  ScheduleSet schedules;  // resolved, one noise entry per agent

  std::optional<OracleConstants> sensitivity;
  // When set, the noise sigmas are replaced by the calibrated ones.
  std::optional<double> calibrate_epsilon;

  int64_t horizon = 1000;
  int seeds = 1;
  uint64_t master_seed = 1;
  InitOptions init;
  // Evaluate the objective every round so running means are exact.
  bool running_means = true;
  int grid_per_decade = 30;
  int64_t grid_dense_below = 100;

  // Advisory findings (violated rate conditions, contraction margins).
  std::vector<std::string> warnings;

  int num_agents() const { return topology.num_agents(); }
};

// Throws ConfigError for schema violations. Rate-condition violations only
// add warnings.
RunConfig ParseConfig(const nlohmann::json& doc);
RunConfig LoadConfig(const std::string& path);

// Fully explicit document that parses back to the same configuration.
nlohmann::json EchoConfig(const RunConfig& config);

std::unique_ptr<Problem> BuildProblem(const RunConfig& config);
// Throws ConfigError when the weights fail validation.
NetworkTopology BuildTopology(const RunConfig& config);

// Per-agent block sizes and the aggregate size implied by the problem spec.
std::vector<int> BlockDims(const RunConfig& config);
int AggregateDim(const RunConfig& config);

// Sensitivity parameters for agent i; needs a `sensitivity` block.
SensitivityParams SensitivityFor(const RunConfig& config,
                                 const NetworkTopology& topology, int agent);

// Replaces the noise sigmas with the calibrated values for `epsilon`.
void ApplyCalibration(RunConfig& config, const NetworkTopology& topology,
                      double epsilon);

// First round at which every contraction coefficient of agent i is below
// one, searched up to `limit`.
std::optional<int64_t> ContractionStart(const SensitivityParams& params,
                                        int64_t limit);

}  // namespace ldpagg

#endif  // LDPAGG_CONFIG_H_
