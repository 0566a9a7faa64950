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

// ldpagg: run experiments, account privacy budgets, fit rates.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime abort.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "ldpagg/analysis.h"
#include "ldpagg/config.h"
#include "ldpagg/privacy.h"
#include "ldpagg/runner.h"

namespace {

using namespace ldpagg;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAbort = 2;

void PrintWarnings(const RunConfig& c) {
  for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";
}

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int Run(const std::string& config_path, int seeds, const std::string& out,
        int threads, bool parallel_agents, bool baseline) {
  RunConfig c = LoadConfig(config_path);
  if (seeds > 0) c.seeds = seeds;
  PrintWarnings(c);
  RunOptions options;
  options.baseline = baseline;
  options.threads = threads;
  options.parallel_agents = parallel_agents;
  const ExperimentRecord record = RunExperiment(c, options);
  WriteExperiment(record, c, options, out);
  for (const auto& s : record.seeds) {
    if (s.diverged_at) {
      std::cerr << "seed " << s.index << " diverged at t = " << *s.diverged_at << "\n";
    }
  }
  std::cout << "wrote " << record.seeds.size() << " seed(s) to " << out << " in "
            << Num(record.wall_seconds) << " s\n";
  return kOk;
}

int Budget(const std::string& config_path, const std::string& horizon_text,
           const std::string& source_text) {
  const RunConfig c = LoadConfig(config_path);
  PrintWarnings(c);
  if (!c.sensitivity) throw ConfigError("/sensitivity", "budget needs a sensitivity block");
  const auto source = ParseDeltaSource(source_text);
  if (!source) throw ConfigError("--source", "expected recursion or closedform");
  std::optional<int64_t> horizon;
  if (horizon_text != "inf") {
    try {
      size_t used = 0;
      horizon = std::stoll(horizon_text, &used);
      if (used != horizon_text.size() || *horizon < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("--horizon", "expected a non-negative integer or inf");
    }
  }
  const NetworkTopology topology = BuildTopology(c);
  std::cout << "agent,eps_x,eps_y,eps_z,eps_total,bound_inf\n";
  for (int i = 0; i < c.num_agents(); ++i) {
    const AgentBudget b = ComputeBudget(SensitivityFor(c, topology, i),
                                        NoiseOf(c.schedules, i), horizon, *source);
    std::cout << i << ',' << Num(b.eps_x) << ',' << Num(b.eps_y) << ',' << Num(b.eps_z)
              << ',' << Num(b.total()) << ',' << Num(b.bound_inf()) << "\n";
  }
  return kOk;
}

int Calibrate(const std::string& config_path, double epsilon, const std::string& out) {
  RunConfig c = LoadConfig(config_path);
  if (!c.sensitivity) throw ConfigError("/sensitivity", "calibration needs a sensitivity block");
  const NetworkTopology topology = BuildTopology(c);
  try {
    ApplyCalibration(c, topology, epsilon);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--epsilon", e.what());
  }
  c.calibrate_epsilon.reset();
  const std::string text = EchoConfig(c).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out) << text;
  }
  return kOk;
}

int Analyze(const std::string& in_dir, const std::string& metric,
            const std::string& window, const std::string& out_csv) {
  namespace fs = std::filesystem;
  std::vector<std::pair<int, fs::path>> files;
  const std::regex name(R"(seed_(\d+)\.csv)");
  if (!fs::is_directory(in_dir)) throw ConfigError(in_dir, "not a directory");
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    std::smatch m;
    const std::string base = entry.path().filename().string();
    if (std::regex_match(base, m, name)) files.emplace_back(std::stoi(m[1]), entry.path());
  }
  if (files.empty()) throw ConfigError(in_dir, "no seed_<k>.csv files");
  std::sort(files.begin(), files.end());
  std::vector<MetricTable> runs;
  size_t rows = SIZE_MAX;
  for (const auto& [k, path] : files) {
    std::ifstream f(path);
    runs.push_back(MetricTable::ReadCsv(f));
    rows = std::min(rows, runs.back().size());
  }
  for (auto& r : runs) {
    MetricTable p(r.columns());
    for (size_t k = 0; k < rows; ++k) p.Append(r.t()[k], r.Row(k));
    r = std::move(p);
  }
  const MetricTable mean = MeanTable(runs);
  if (!mean.HasColumn(metric)) throw ConfigError("--metric", "no column named " + metric);

  double lo = 0.0;
  double hi = 0.0;
  const int64_t last = mean.t().empty() ? 0 : mean.t().back();
  if (window.empty()) {
    lo = static_cast<double>(last) / 100.0;
    hi = static_cast<double>(last);
  } else {
    const auto comma = window.find(',');
    if (comma == std::string::npos) throw ConfigError("--window", "expected a,b");
    try {
      lo = std::stod(window.substr(0, comma));
      hi = std::stod(window.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("--window", "expected two numbers a,b");
    }
  }
  SlopeFit fit;
  try {
    fit = FitRate(mean.t(), mean.Column(metric), lo, hi, static_cast<int>(runs.size()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--window", e.what());
  }
  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    MetricTable series({metric});
    const std::vector<double> col = mean.Column(metric);
    for (size_t k = 0; k < col.size(); ++k) series.Append(mean.t()[k], {col[k]});
    series.WriteCsv(f);
  }
  nlohmann::json j;
  j["metric"] = metric;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["ci"] = {fit.ci_low, fit.ci_high};
  j["r2"] = fit.r2;
  j["window"] = {fit.t_lo, fit.t_hi};
  j["points"] = fit.points;
  j["seeds"] = fit.seeds;
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int Validate(const std::string& config_path) {
  const RunConfig c = LoadConfig(config_path);
  const NetworkTopology topology = BuildTopology(c);
  std::cout << ValidateWeights(topology.weights()).ToString();
  std::cout << CheckConditions(c.schedules, c.convexity).ToString();
  PrintWarnings(c);
  std::cout << "config ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private distributed aggregative optimization toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  int seeds = 0;
  int threads = 0;
  bool parallel_agents = false;
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--seeds", seeds, "number of seeds (overrides the config)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: all)");
    sub->add_flag("--parallel-agents", parallel_agents,
                  "spread agents over threads inside each round");
  };
  CLI::App* run = app.add_subcommand("run", "run the private method");
  add_run(run);
  CLI::App* baseline = app.add_subcommand("baseline", "run the gradient-tracking baseline");
  add_run(baseline);

  std::string horizon = "inf";
  std::string source = "recursion";
  CLI::App* budget = app.add_subcommand("budget", "per-agent privacy budget");
  budget->add_option("--config", config)->required();
  budget->add_option("--horizon", horizon, "T or inf");
  budget->add_option("--source", source, "recursion or closedform");

  double epsilon = 1.0;
  std::string calibrated_out;
  CLI::App* calibrate = app.add_subcommand("calibrate", "noise levels for a target budget");
  calibrate->add_option("--config", config)->required();
  calibrate->add_option("--epsilon", epsilon)->required();
  calibrate->add_option("--out", calibrated_out, "write the patched config here");

  std::string in_dir;
  std::string metric;
  std::string window;
  std::string series_out;
  CLI::App* analyze = app.add_subcommand("analyze", "fit a log-log rate");
  analyze->add_option("--in", in_dir)->required();
  analyze->add_option("--metric", metric)->required();
  analyze->add_option("--window", window, "t_lo,t_hi (default T/100,T)");
  analyze->add_option("--out", series_out, "write the averaged series as CSV");

  CLI::App* validate = app.add_subcommand("validate", "check a config");
  validate->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return Run(config, seeds, out, threads, parallel_agents, false);
    if (*baseline) return Run(config, seeds, out, threads, parallel_agents, true);
    if (*budget) return Budget(config, horizon, source);
    if (*calibrate) return Calibrate(config, epsilon, calibrated_out);
    if (*analyze) return Analyze(in_dir, metric, window, series_out);
    if (*validate) return Validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const NumericalAbort& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kAbort;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kAbort;
  }
  return kInvalid;
}
