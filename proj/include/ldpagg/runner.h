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

#ifndef LDPAGG_RUNNER_H_
#define LDPAGG_RUNNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpagg/analysis.h"
#include "ldpagg/config.h"
#include "ldpagg/privacy.h"

namespace ldpagg {

struct RunOptions {
  bool baseline = false;
  // Worker threads over seeds; 0 means the OpenMP default.
  int threads = 0;
  // Distribute agents over threads inside each round.
  bool parallel_agents = false;
};

struct SeedRecord {
  int index = 0;
  uint64_t run_seed = 0;
  MetricTable metrics;
  Vector final_x;  // stacked own blocks
  // Set when the baseline stopped on a non-finite state.
  std::optional<int64_t> diverged_at;
  std::vector<TrajectoryExtremes> extremes;  // empty for the baseline
  double wall_seconds = 0.0;
};

struct ExperimentRecord {
  std::vector<SeedRecord> seeds;
  // Cross-seed mean over the common sampling grid.
  MetricTable mean;
  double wall_seconds = 0.0;
};

// Runs one seed of `config` on prebuilt problem and topology. Throws
// NumericalAbort when the private method produces a non-finite state.
SeedRecord RunOneSeed(const RunConfig& config, const Problem& problem,
                      const NetworkTopology& topology, int seed_index,
                      const RunOptions& options);

// All seeds, spread over `options.threads` workers. Results do not depend on
// the thread count.
ExperimentRecord RunExperiment(const RunConfig& config, const RunOptions& options);

// seed_<k>.csv per seed, aggregate.csv and manifest.json.
void WriteExperiment(const ExperimentRecord& record, const RunConfig& config,
                     const RunOptions& options, const std::string& out_dir);

// Per-seed CSV bytes, as WriteExperiment stores them.
std::string CsvBytes(const MetricTable& table);

}  // namespace ldpagg

#endif  // LDPAGG_RUNNER_H_
