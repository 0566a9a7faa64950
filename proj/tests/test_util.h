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

#ifndef LDPAGG_TESTS_TEST_UTIL_H_
#define LDPAGG_TESTS_TEST_UTIL_H_

#include <fstream>
#include <string>

#include <json.hpp>

#include "ldpagg/privacy.h"
#include "ldpagg/problems.h"

namespace ldpagg::testing {

inline nlohmann::json LoadFixture(const std::string& name) {
  std::ifstream in(std::string(LDPAGG_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

inline Vector ToVector(const nlohmann::json& j) {
  Vector v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

// The reference quadratic instance: m = 5, n_i = 2, r = 2, γ = 1, seed 7.
inline QuadraticSpec ReferenceQuadratic() {
  QuadraticSpec s;
  s.num_agents = 5;
  s.block_dims = {2};
  s.aggregate_dim = 2;
  s.gamma = 1.0;
  s.seed = 7;
  return s;
}

// Sensitivity parameters of the privacy fixture under the strongly convex
// preset with unit initial stepsizes.
inline SensitivityParams FixtureSensitivity() {
  const nlohmann::json fx = LoadFixture("sensitivity_params.json");
  const auto& s = fx["sensitivity"];
  const auto& e = fx["exponents"];
  SensitivityParams p;
  p.oracle = {s["L_l"], s["L_h"], s["Lbar_l"], s["Lbar_h"], s["d_l"], s["d_z"]};
  p.w_bar = fx["w_bar"];
  p.block_dim = fx["n_i"];
  p.aggregate_dim = fx["r"];
  p.lambda_x = {1.0, e["v_x"]};
  p.lambda_y = {1.0, e["v_y"]};
  p.lambda_z = {1.0, e["v_z"]};
  return p;
}

inline AgentNoise FixtureNoise(double sigma = 0.1) {
  const nlohmann::json e = LoadFixture("sensitivity_params.json")["exponents"];
  return {{sigma, e["varsigma_x"]}, {sigma, e["varsigma_y"]}, {sigma, e["varsigma_z"]}};
}

}  // namespace ldpagg::testing

#endif  // LDPAGG_TESTS_TEST_UTIL_H_
