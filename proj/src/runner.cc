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

#include "ldpagg/runner.h"

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <omp.h>

namespace ldpagg {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Column layout shared by every seed of one experiment.
struct Layout {
  bool gap = false;
  bool err = false;
  bool running = false;
  bool consensus = false;
  bool drift = false;
  int eps_agents = 0;

  std::vector<std::string> Names() const {
    std::vector<std::string> out;
    if (gap) out.push_back("F_gap");
    if (gap && running) out.push_back("F_gap_running_mean");
    out.push_back("grad_norm_sq");
    if (running) out.push_back("grad_norm_sq_running_mean");
    if (err) out.push_back("err_to_opt_sq");
    if (consensus) {
      out.push_back("consensus_x");
      out.push_back("consensus_y");
      out.push_back("consensus_z");
    }
    if (drift) {
      out.push_back("tracker_drift_sq");
      out.push_back("tracker_dispersion");
    }
    for (int i = 0; i < eps_agents; ++i) out.push_back("eps_cum_" + std::to_string(i));
    return out;
  }
};

bool AccountsPrivacy(const RunConfig& c, const NetworkTopology& topology,
                     const RunOptions& options) {
  return !options.baseline && c.sensitivity && c.schedules.noise_enabled &&
         topology.w_bar() > 0.0;
}

// Drives either method through one uniform interface.
class Driver {
 public:
  Driver(const RunConfig& c, const Problem& problem, const NetworkTopology& topology,
         uint64_t run_seed, const RunOptions& options)
      : parallel_(options.parallel_agents) {
    if (options.baseline) {
      baseline_.emplace(problem, topology, c.schedules, run_seed, c.init);
    } else {
      private_.emplace(problem, topology, c.schedules, run_seed, c.init);
    }
  }

  void Step() {
    if (baseline_) {
      baseline_->Step();
    } else if (parallel_) {
      private_->StepParallel();
    } else {
      private_->Step();
    }
  }

  Vector OwnBlocks() const {
    return baseline_ ? baseline_->OwnBlocks() : private_->OwnBlocks();
  }
  const PrivateTracking* private_method() const {
    return private_ ? &*private_ : nullptr;
  }
  const GradientTrackingBaseline* baseline() const {
    return baseline_ ? &*baseline_ : nullptr;
  }

 private:
  bool parallel_;
  std::optional<PrivateTracking> private_;
  std::optional<GradientTrackingBaseline> baseline_;
};

}  // namespace

SeedRecord RunOneSeed(const RunConfig& c, const Problem& problem,
                      const NetworkTopology& topology, int seed_index,
                      const RunOptions& options) {
  const auto start = Clock::now();
  SeedRecord rec;
  rec.index = seed_index;
  rec.run_seed = RunSeed(c.master_seed, static_cast<uint64_t>(seed_index));

  Layout layout;
  layout.gap = problem.optimal_value().has_value();
  layout.err = problem.optimum().has_value();
  layout.running = c.running_means;
  layout.consensus = !options.baseline;
  layout.drift = options.baseline;
  std::vector<std::vector<double>> eps;
  if (AccountsPrivacy(c, topology, options)) {
    layout.eps_agents = problem.num_agents();
    for (int i = 0; i < problem.num_agents(); ++i) {
      eps.push_back(CumulativeBudget(SensitivityFor(c, topology, i),
                                     NoiseOf(c.schedules, i), c.horizon));
    }
  }
  rec.metrics = MetricTable(layout.Names());

  const std::vector<int64_t> grid =
      SamplingGrid(c.horizon, c.grid_per_decade, c.grid_dense_below);
  Driver driver(c, problem, topology, rec.run_seed, options);
  double gap_sum = 0.0;
  double grad_sum = 0.0;
  size_t next = 0;
  for (int64_t t = 0; t <= c.horizon; ++t) {
    const bool sampled = next < grid.size() && grid[next] == t;
    if (sampled || c.running_means) {
      const Vector x = driver.OwnBlocks();
      const std::optional<double> gap = ObjectiveGap(problem, x);
      const double grad = GradNormSq(problem, x);
      if (gap) gap_sum += *gap;
      grad_sum += grad;
      if (sampled) {
        ++next;
        const double count = static_cast<double>(t) + 1.0;
        std::vector<double> row;
        if (layout.gap) row.push_back(*gap);
        if (layout.gap && layout.running) row.push_back(gap_sum / count);
        row.push_back(grad);
        if (layout.running) row.push_back(grad_sum / count);
        if (layout.err) row.push_back(*ErrToOptSq(problem, x));
        if (const PrivateTracking* p = driver.private_method()) {
          row.push_back(ConsensusX(p->states()));
          row.push_back(ConsensusY(p->states()));
          row.push_back(ConsensusZ(p->states()));
        }
        if (const GradientTrackingBaseline* b = driver.baseline()) {
          row.push_back(b->TrackerDriftSq());
          row.push_back(b->TrackerDispersion());
        }
        for (const auto& e : eps) row.push_back(e[t]);
        const bool finite = std::all_of(row.begin(), row.end(),
                                        [](double v) { return std::isfinite(v); });
        if (!finite) {
          rec.metrics.truncated_at = t;
          rec.diverged_at = t;
          break;
        }
        rec.metrics.Append(t, std::move(row));
      }
    }
    if (t == c.horizon) break;
    try {
      driver.Step();
    } catch (const NumericalAbort& abort) {
      if (!options.baseline) throw;
      rec.diverged_at = abort.iteration();
      rec.metrics.truncated_at = abort.iteration() + 1;
      break;
    }
  }

  rec.final_x = driver.OwnBlocks();
  if (const PrivateTracking* p = driver.private_method()) {
    for (const auto& s : p->states()) rec.extremes.push_back({s.max_z_norm, s.max_l1});
  }
  rec.wall_seconds = SecondsSince(start);
  return rec;
}

ExperimentRecord RunExperiment(const RunConfig& c, const RunOptions& options) {
  const auto start = Clock::now();
  const std::unique_ptr<Problem> problem = BuildProblem(c);
  const NetworkTopology topology = BuildTopology(c);

  ExperimentRecord out;
  out.seeds.resize(c.seeds);
  std::vector<std::exception_ptr> errors(c.seeds);
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int k = 0; k < c.seeds; ++k) {
    try {
      out.seeds[k] = RunOneSeed(c, *problem, topology, k, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Average over the grid prefix every seed reached.
  size_t rows = SIZE_MAX;
  for (const auto& s : out.seeds) rows = std::min(rows, s.metrics.size());
  std::vector<MetricTable> prefixes;
  for (const auto& s : out.seeds) {
    MetricTable p(s.metrics.columns());
    for (size_t k = 0; k < rows; ++k) p.Append(s.metrics.t()[k], s.metrics.Row(k));
    prefixes.push_back(std::move(p));
  }
  out.mean = MeanTable(prefixes);
  out.wall_seconds = SecondsSince(start);
  return out;
}

std::string CsvBytes(const MetricTable& table) {
  std::ostringstream out;
  table.WriteCsv(out);
  return out.str();
}

void WriteExperiment(const ExperimentRecord& record, const RunConfig& c,
                     const RunOptions& options, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& bytes) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << bytes;
  };
  for (const auto& s : record.seeds) {
    write("seed_" + std::to_string(s.index) + ".csv", CsvBytes(s.metrics));
  }
  write("aggregate.csv", CsvBytes(record.mean));

  nlohmann::json manifest;
  manifest["config"] = EchoConfig(c);
  manifest["master_seed"] = c.master_seed;
  manifest["baseline"] = options.baseline;
  manifest["threads"] = options.threads;
  manifest["wall_time_seconds"] = record.wall_seconds;
  manifest["warnings"] = c.warnings;
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : record.seeds) {
    nlohmann::json e;
    e["index"] = s.index;
    e["run_seed"] = s.run_seed;
    e["csv"] = "seed_" + std::to_string(s.index) + ".csv";
    e["wall_time_seconds"] = s.wall_seconds;
    if (s.diverged_at) e["diverged_at"] = *s.diverged_at;
    seeds.push_back(e);
  }
  manifest["seeds"] = seeds;

  if (!options.baseline && c.sensitivity && !record.seeds.empty()) {
    std::vector<TrajectoryExtremes> worst(record.seeds.front().extremes.size());
    for (const auto& s : record.seeds) {
      for (size_t i = 0; i < s.extremes.size(); ++i) {
        worst[i].max_z_norm = std::max(worst[i].max_z_norm, s.extremes[i].max_z_norm);
        worst[i].max_l1 = std::max(worst[i].max_l1, s.extremes[i].max_l1);
      }
    }
    const BoundAudit audit = EmpiricalBoundCheck(worst, *c.sensitivity);
    nlohmann::json a;
    a["sound"] = audit.sound;
    a["tightest_d_z"] = audit.tightest_bound_z;
    a["tightest_d_l"] = audit.tightest_bound_l;
    manifest["bound_audit"] = a;
  }
  write("manifest.json", manifest.dump(2) + "\n");
}

}  // namespace ldpagg
