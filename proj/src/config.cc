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

#include "ldpagg/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ldpagg {
namespace {

using nlohmann::json;

// A JSON value plus the pointer that reached it, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  void RequireObject(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) Fail("expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        throw ConfigError(Child(it.key()), "unknown key");
      }
    }
  }

  bool Has(const std::string& key) const {
    return j_.is_object() && j_.contains(key);
  }
  Node operator[](const std::string& key) const {
    if (!Has(key)) throw ConfigError(Child(key), "missing required key");
    return Node(j_.at(key), Child(key));
  }

  double Number() const {
    if (!j_.is_number()) Fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) Fail("expected a finite number");
    return v;
  }
  int64_t Integer() const {
    if (!j_.is_number_integer()) Fail("expected an integer");
    return j_.get<int64_t>();
  }
  uint64_t Unsigned() const {
    if (!j_.is_number_unsigned()) Fail("expected a non-negative integer");
    return j_.get<uint64_t>();
  }
  bool Bool() const {
    if (!j_.is_boolean()) Fail("expected true or false");
    return j_.get<bool>();
  }
  std::string String() const {
    if (!j_.is_string()) Fail("expected a string");
    return j_.get<std::string>();
  }
  std::vector<double> Numbers() const {
    if (!j_.is_array()) Fail("expected an array");
    std::vector<double> out;
    for (size_t k = 0; k < j_.size(); ++k) {
      out.push_back(Node(j_[k], Child(std::to_string(k))).Number());
    }
    return out;
  }
  // [lo, hi] with lo <= hi.
  std::pair<double, double> Range() const {
    const std::vector<double> v = Numbers();
    if (v.size() != 2) Fail("expected [lo, hi]");
    if (v[0] > v[1]) Fail("inverted bounds");
    return {v[0], v[1]};
  }
  Matrix Dense() const {
    if (!j_.is_array() || j_.empty()) Fail("expected a non-empty array of rows");
    const size_t rows = j_.size();
    size_t cols = 0;
    Matrix out;
    for (size_t r = 0; r < rows; ++r) {
      const std::vector<double> row = Node(j_[r], Child(std::to_string(r))).Numbers();
      if (r == 0) {
        cols = row.size();
        out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      } else if (row.size() != cols) {
        throw ConfigError(Child(std::to_string(r)), "ragged matrix row");
      }
      for (size_t c = 0; c < cols; ++c) out(r, c) = row[c];
    }
    return out;
  }

  double Number(const std::string& key, double fallback) const {
    return Has(key) ? (*this)[key].Number() : fallback;
  }
  int64_t Integer(const std::string& key, int64_t fallback) const {
    return Has(key) ? (*this)[key].Integer() : fallback;
  }
  bool Bool(const std::string& key, bool fallback) const {
    return Has(key) ? (*this)[key].Bool() : fallback;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw ConfigError(path_, message);
  }

 private:
  std::string Child(const std::string& key) const { return path_ + "/" + key; }

  const json& j_;
  std::string path_;
};

void Require(bool ok, const Node& node, const std::string& message) {
  if (!ok) node.Fail(message);
}

Vector ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix DenseOrEmpty(const Node& n) { return n.Dense(); }

json MatrixJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json VectorJson(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

void ParseQuadratic(const Node& n, QuadraticSpec& q) {
  n.RequireObject({"block_dims", "aggregate_dim", "gamma", "x_weight", "xi_std",
                   "phi_std", "a_scale", "box", "seed", "fast_path", "agents"});
  if (n.Has("block_dims")) {
    const Node b = n["block_dims"];
    q.block_dims.clear();
    if (b.raw().is_array()) {
      for (size_t k = 0; k < b.raw().size(); ++k) {
        q.block_dims.push_back(static_cast<int>(
            Node(b.raw()[k], b.path() + "/" + std::to_string(k)).Integer()));
      }
    } else {
      q.block_dims.push_back(static_cast<int>(b.Integer()));
    }
    for (int d : q.block_dims) Require(d >= 1, b, "block dimensions must be >= 1");
  }
  q.aggregate_dim = static_cast<int>(n.Integer("aggregate_dim", q.aggregate_dim));
  Require(q.aggregate_dim >= 1, n, "aggregate_dim must be >= 1");
  q.gamma = n.Number("gamma", q.gamma);
  if (q.gamma < 0.0) n["gamma"].Fail("gamma must be >= 0");
  q.x_weight = n.Number("x_weight", q.x_weight);
  if (q.x_weight < 0.0) n["x_weight"].Fail("x_weight must be >= 0");
  q.xi_std = n.Number("xi_std", q.xi_std);
  q.phi_std = n.Number("phi_std", q.phi_std);
  if (q.xi_std < 0.0) n["xi_std"].Fail("must be >= 0");
  if (q.phi_std < 0.0) n["phi_std"].Fail("must be >= 0");
  q.a_scale = n.Number("a_scale", q.a_scale);
  if (n.Has("box")) std::tie(q.box_lo, q.box_hi) = n["box"].Range();
  if (n.Has("seed")) q.seed = n["seed"].Unsigned();
  q.fast_path = n.Bool("fast_path", q.fast_path);
  if (n.Has("agents")) {
    const Node list = n["agents"];
    Require(list.raw().is_array(), list, "expected an array of agents");
    q.agents.clear();
    for (size_t k = 0; k < list.raw().size(); ++k) {
      const Node a(list.raw()[k], list.path() + "/" + std::to_string(k));
      a.RequireObject({"a", "b", "c", "d"});
      QuadraticAgentData d;
      d.a = DenseOrEmpty(a["a"]);
      d.b = ToVector(a["b"].Numbers());
      d.c = ToVector(a["c"].Numbers());
      d.d = ToVector(a["d"].Numbers());
      if (d.b.size() != d.a.rows() || d.d.size() != d.a.rows() ||
          d.c.size() != d.a.cols()) {
        a.Fail("inconsistent sizes of a, b, c, d");
      }
      q.agents.push_back(std::move(d));
    }
    Require(!q.agents.empty(), list, "empty agent list");
    q.aggregate_dim = static_cast<int>(q.agents.front().a.rows());
    q.block_dims.clear();
    for (const auto& d : q.agents) {
      if (d.a.rows() != q.aggregate_dim) list.Fail("agents disagree on r");
      q.block_dims.push_back(static_cast<int>(d.a.cols()));
    }
  }
}

void ParsePersonalized(const Node& n, PersonalizedSpec& p) {
  n.RequireObject({"classes", "features", "lambda", "l2", "samples_per_agent",
                   "major_share", "cluster_std", "separation", "box",
                   "identical_agents", "seed", "fast_path"});
  p.classes = static_cast<int>(n.Integer("classes", p.classes));
  Require(p.classes >= 2, n, "classes must be >= 2");
  p.features = static_cast<int>(n.Integer("features", p.features));
  Require(p.features >= 1, n, "features must be >= 1");
  p.lambda = n.Number("lambda", p.lambda);
  if (p.lambda < 0.0) n["lambda"].Fail("lambda must be >= 0");
  p.l2 = n.Number("l2", p.l2);
  if (p.l2 < 0.0) n["l2"].Fail("l2 must be >= 0");
  p.samples_per_agent =
      static_cast<int>(n.Integer("samples_per_agent", p.samples_per_agent));
  Require(p.samples_per_agent >= 1, n, "samples_per_agent must be >= 1");
  p.major_share = n.Number("major_share", p.major_share);
  if (p.major_share < 0.0 || p.major_share > 1.0) {
    n["major_share"].Fail("must lie in [0, 1]");
  }
  p.cluster_std = n.Number("cluster_std", p.cluster_std);
  p.separation = n.Number("separation", p.separation);
  if (n.Has("box")) std::tie(p.box_lo, p.box_hi) = n["box"].Range();
  p.identical_agents = n.Bool("identical_agents", p.identical_agents);
  if (n.Has("seed")) p.seed = n["seed"].Unsigned();
  p.fast_path = n.Bool("fast_path", p.fast_path);
}

void ParseTopology(const Node& n, TopologySpec& t) {
  n.RequireObject({"ring", "matrix", "trivial"});
  const int kinds = n.Has("ring") + n.Has("matrix") + n.Has("trivial");
  Require(kinds == 1, n, "give exactly one of ring, matrix, trivial");
  if (n.Has("ring")) {
    const Node r = n["ring"];
    r.RequireObject({"m", "w"});
    t.kind = TopologySpec::Kind::kRing;
    t.m = static_cast<int>(r["m"].Integer());
    t.w = r["w"].Number();
    if (t.m < 2) r["m"].Fail("ring needs m >= 2");
    if (!(t.w > 0.0 && t.w < 0.5)) r["w"].Fail("ring weight must lie in (0, 1/2)");
  } else if (n.Has("matrix")) {
    t.kind = TopologySpec::Kind::kMatrix;
    t.matrix = n["matrix"].Dense();
    if (t.matrix.rows() != t.matrix.cols()) n["matrix"].Fail("matrix must be square");
    t.m = static_cast<int>(t.matrix.rows());
  } else {
    Require(n["trivial"].Bool(), n["trivial"], "trivial must be true");
    t.kind = TopologySpec::Kind::kTrivial;
    t.m = 1;
  }
}

// Scalar broadcast to every agent, or one value per agent.
std::vector<double> PerAgent(const Node& n, int m) {
  if (n.raw().is_array()) {
    std::vector<double> v = n.Numbers();
    if (static_cast<int>(v.size()) != m) {
      n.Fail("expected " + std::to_string(m) + " per-agent values");
    }
    return v;
  }
  return std::vector<double>(m, n.Number());
}

std::optional<ConvexityCase> PresetCase(const std::string& preset) {
  const std::string prefix = "corollary1-";
  if (preset.rfind(prefix, 0) != 0) return std::nullopt;
  return ParseConvexityCase(preset.substr(prefix.size()));
}

}  // namespace

int TopologySpec::num_agents() const {
  switch (kind) {
    case Kind::kRing:
      return m;
    case Kind::kMatrix:
      return static_cast<int>(matrix.rows());
    case Kind::kTrivial:
      return 1;
  }
  return 0;
}

std::vector<int> BlockDims(const RunConfig& c) {
  const int m = c.num_agents();
  if (c.problem == "personalized") {
    return std::vector<int>(m, c.personalized.classes * (c.personalized.features + 1));
  }
  if (!c.quadratic.agents.empty()) {
    std::vector<int> dims;
    for (const auto& a : c.quadratic.agents) dims.push_back(static_cast<int>(a.a.cols()));
    return dims;
  }
  if (c.quadratic.block_dims.empty()) return std::vector<int>(m, 2);
  if (c.quadratic.block_dims.size() == 1) {
    return std::vector<int>(m, c.quadratic.block_dims.front());
  }
  return c.quadratic.block_dims;
}

int AggregateDim(const RunConfig& c) {
  return c.problem == "personalized" ? 1 : c.quadratic.aggregate_dim;
}

std::optional<int64_t> ContractionStart(const SensitivityParams& params,
                                        int64_t limit) {
  for (int64_t t = 0; t <= limit; ++t) {
    if (Contraction(t, params).contracting()) return t;
  }
  return std::nullopt;
}

RunConfig ParseConfig(const json& doc) {
  const Node root(doc, "");
  root.RequireObject({"problem", "quadratic", "personalized", "topology", "preset",
                      "delta", "convexity", "stepsize", "noise", "sensitivity",
                      "calibration", "T", "seeds", "master_seed", "init", "metrics"});
  RunConfig c;

  c.problem = root.Has("problem") ? root["problem"].String() : c.problem;
  if (c.problem != "quadratic" && c.problem != "personalized") {
    root["problem"].Fail("expected \"quadratic\" or \"personalized\"");
  }
  if (root.Has("quadratic")) {
    if (c.problem != "quadratic") root["quadratic"].Fail("block does not match problem");
    ParseQuadratic(root["quadratic"], c.quadratic);
  }
  if (root.Has("personalized")) {
    if (c.problem != "personalized") {
      root["personalized"].Fail("block does not match problem");
    }
    ParsePersonalized(root["personalized"], c.personalized);
  }
  if (root.Has("topology")) ParseTopology(root["topology"], c.topology);
  const int m = c.num_agents();
  c.quadratic.num_agents = m;
  c.personalized.num_agents = m;
  if (c.problem == "quadratic") {
    if (!c.quadratic.agents.empty() && static_cast<int>(c.quadratic.agents.size()) != m) {
      root["quadratic"]["agents"].Fail("needs one entry per agent of the topology");
    }
    if (c.quadratic.block_dims.size() > 1 &&
        static_cast<int>(c.quadratic.block_dims.size()) != m) {
      root["quadratic"]["block_dims"].Fail("needs one entry per agent");
    }
  }

  // Exponents: preset first, explicit values override.
  Exponents e;
  bool have_preset = false;
  if (root.Has("preset")) {
    c.preset = root["preset"].String();
    const auto pc = PresetCase(*c.preset);
    if (!pc) root["preset"].Fail("expected corollary1-sc, corollary1-cvx or corollary1-ncvx");
    c.convexity = *pc;
    c.delta = root.Number("delta", c.delta);
    try {
      e = RatePreset(*pc, c.delta);
    } catch (const std::invalid_argument& err) {
      root["delta"].Fail(err.what());
    }
    have_preset = true;
  } else if (root.Has("delta")) {
    root["delta"].Fail("delta needs a preset");
  }
  if (root.Has("convexity")) {
    const auto cc = ParseConvexityCase(root["convexity"].String());
    if (!cc) root["convexity"].Fail("expected sc, cvx or ncvx");
    c.convexity = *cc;
  }

  struct Axis {
    const char* key;
    StepsizeSchedule* step;
    double preset_v;
    std::vector<NoiseSchedule>* noise;
    double preset_varsigma;
  };
  Axis axes[] = {{"x", &c.schedules.lambda_x, e.v_x, &c.schedules.noise_x, e.varsigma_x},
                 {"y", &c.schedules.lambda_y, e.v_y, &c.schedules.noise_y, e.varsigma_y},
                 {"z", &c.schedules.lambda_z, e.v_z, &c.schedules.noise_z, e.varsigma_z}};

  std::optional<Node> step_node;
  if (root.Has("stepsize")) {
    step_node.emplace(root["stepsize"]);
    step_node->RequireObject({"x", "y", "z"});
  }
  std::optional<Node> noise_node;
  if (root.Has("noise")) {
    noise_node.emplace(root["noise"]);
    noise_node->RequireObject({"enabled", "x", "y", "z"});
    c.schedules.noise_enabled = noise_node->Bool("enabled", true);
  }
  for (Axis& a : axes) {
    a.step->lambda0 = 1.0;
    a.step->v = a.preset_v;
    bool have_v = have_preset;
    if (step_node && step_node->Has(a.key)) {
      const Node s = (*step_node)[a.key];
      s.RequireObject({"lambda0", "v"});
      a.step->lambda0 = s.Number("lambda0", 1.0);
      if (!(a.step->lambda0 > 0.0)) s["lambda0"].Fail("must be positive");
      if (s.Has("v")) {
        a.step->v = s["v"].Number();
        have_v = true;
      }
    }
    if (!have_v) {
      throw ConfigError(std::string("/stepsize/") + a.key + "/v",
                        "missing decay exponent and no preset given");
    }
    if (!(a.step->v > 0.0 && a.step->v < 1.0)) {
      throw ConfigError(std::string("/stepsize/") + a.key + "/v", "must lie in (0, 1)");
    }

    std::vector<double> sigma(m, 0.1);
    std::vector<double> varsigma(m, a.preset_varsigma);
    bool have_varsigma = have_preset;
    if (noise_node && noise_node->Has(a.key)) {
      const Node s = (*noise_node)[a.key];
      s.RequireObject({"sigma", "varsigma"});
      if (s.Has("sigma")) sigma = PerAgent(s["sigma"], m);
      if (s.Has("varsigma")) {
        varsigma = PerAgent(s["varsigma"], m);
        have_varsigma = true;
      }
      for (double v : sigma) {
        if (!(v > 0.0)) s["sigma"].Fail("must be positive");
      }
      for (double v : varsigma) {
        if (!(v >= 0.0)) s["varsigma"].Fail("must be >= 0");
      }
    }
    if (!have_varsigma) {
      throw ConfigError(std::string("/noise/") + a.key + "/varsigma",
                        "missing decay exponent and no preset given");
    }
    a.noise->clear();
    for (int i = 0; i < m; ++i) a.noise->push_back({sigma[i], varsigma[i]});
  }

  if (root.Has("sensitivity")) {
    const Node s = root["sensitivity"];
    s.RequireObject({"L_l", "L_h", "Lbar_l", "Lbar_h", "d_l", "d_z"});
    OracleConstants o;
    o.lip_l = s.Number("L_l", o.lip_l);
    o.lip_h = s.Number("L_h", o.lip_h);
    o.lip_grad_l = s.Number("Lbar_l", o.lip_grad_l);
    o.lip_grad_h = s.Number("Lbar_h", o.lip_grad_h);
    o.bound_l = s.Number("d_l", o.bound_l);
    o.bound_z = s.Number("d_z", o.bound_z);
    for (double v : {o.lip_l, o.lip_h, o.lip_grad_l, o.lip_grad_h, o.bound_l, o.bound_z}) {
      if (!(v >= 0.0)) s.Fail("constants must be >= 0");
    }
    c.sensitivity = o;
  }
  if (root.Has("calibration")) {
    const Node s = root["calibration"];
    s.RequireObject({"epsilon"});
    c.calibrate_epsilon = s["epsilon"].Number();
    if (!(*c.calibrate_epsilon > 0.0)) s["epsilon"].Fail("must be positive");
    if (!c.sensitivity) s.Fail("calibration needs a sensitivity block");
  }

  c.horizon = root.Integer("T", c.horizon);
  if (c.horizon < 0) root["T"].Fail("must be >= 0");
  c.seeds = static_cast<int>(root.Integer("seeds", c.seeds));
  if (c.seeds < 1) root["seeds"].Fail("must be >= 1");
  if (root.Has("master_seed")) c.master_seed = root["master_seed"].Unsigned();
  if (root.Has("init")) {
    const Node s = root["init"];
    s.RequireObject({"x_range"});
    if (s.Has("x_range")) {
      const auto [lo, hi] = s["x_range"].Range();
      c.init.x_lo = lo;
      c.init.x_hi = hi;
    }
  }
  if (root.Has("metrics")) {
    const Node s = root["metrics"];
    s.RequireObject({"running_means", "grid_per_decade", "dense_below"});
    c.running_means = s.Bool("running_means", c.running_means);
    c.grid_per_decade = static_cast<int>(s.Integer("grid_per_decade", c.grid_per_decade));
    c.grid_dense_below = s.Integer("dense_below", c.grid_dense_below);
    if (c.grid_per_decade < 1) s["grid_per_decade"].Fail("must be >= 1");
    if (c.grid_dense_below < 1) s["dense_below"].Fail("must be >= 1");
  }

  // Structural checks are fatal.
  const NetworkTopology topology = BuildTopology(c);
  try {
    c.schedules.ValidateStructure();
  } catch (const std::invalid_argument& err) {
    throw ConfigError("/stepsize", err.what());
  }
  if (c.problem == "quadratic") {
    const Box box = Box::Uniform(1, c.quadratic.box_lo, c.quadratic.box_hi);
    box.Validate();
  }

  if (c.calibrate_epsilon) {
    try {
      ApplyCalibration(c, topology, *c.calibrate_epsilon);
    } catch (const std::invalid_argument& err) {
      throw ConfigError("/calibration/epsilon", err.what());
    }
  }

  // Advisory checks.
  const ConditionReport report = CheckConditions(c.schedules, c.convexity);
  for (const auto& f : report.Failures()) {
    c.warnings.push_back("rate condition violated (" +
                         std::string(ToString(c.convexity)) + "): " + f);
  }
  if (c.sensitivity && topology.num_agents() >= 2) {
    for (int i = 0; i < m; ++i) {
      const SensitivityParams p = SensitivityFor(c, topology, i);
      const std::optional<int64_t> start = ContractionStart(p, std::max<int64_t>(c.horizon, 1000));
      if (!start) {
        c.warnings.push_back("agent " + std::to_string(i) +
                             ": sensitivity recursion never contracts within the horizon");
      } else if (*start > 0) {
        std::ostringstream msg;
        msg << "agent " << i << ": sensitivity recursion contracts from t = " << *start
            << " (x coefficient at t = 0: " << Contraction(0, p).x << ")";
        c.warnings.push_back(msg.str());
      }
    }
  }
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(path, std::string("invalid JSON: ") + err.what());
  }
  return ParseConfig(doc);
}

json EchoConfig(const RunConfig& c) {
  json doc;
  doc["problem"] = c.problem;
  if (c.problem == "quadratic") {
    const QuadraticSpec& q = c.quadratic;
    json b;
    if (q.agents.empty()) {
      b["block_dims"] = BlockDims(c);
      b["aggregate_dim"] = q.aggregate_dim;
      b["seed"] = q.seed;
      b["a_scale"] = q.a_scale;
    } else {
      json agents = json::array();
      for (const auto& a : q.agents) {
        agents.push_back({{"a", MatrixJson(a.a)},
                          {"b", VectorJson(a.b)},
                          {"c", VectorJson(a.c)},
                          {"d", VectorJson(a.d)}});
      }
      b["agents"] = agents;
    }
    b["gamma"] = q.gamma;
    b["x_weight"] = q.x_weight;
    b["xi_std"] = q.xi_std;
    b["phi_std"] = q.phi_std;
    b["box"] = {q.box_lo, q.box_hi};
    b["fast_path"] = q.fast_path;
    doc["quadratic"] = b;
  } else {
    const PersonalizedSpec& p = c.personalized;
    doc["personalized"] = {{"classes", p.classes},
                           {"features", p.features},
                           {"lambda", p.lambda},
                           {"l2", p.l2},
                           {"samples_per_agent", p.samples_per_agent},
                           {"major_share", p.major_share},
                           {"cluster_std", p.cluster_std},
                           {"separation", p.separation},
                           {"box", {p.box_lo, p.box_hi}},
                           {"identical_agents", p.identical_agents},
                           {"seed", p.seed},
                           {"fast_path", p.fast_path}};
  }
  switch (c.topology.kind) {
    case TopologySpec::Kind::kRing:
      doc["topology"] = {{"ring", {{"m", c.topology.m}, {"w", c.topology.w}}}};
      break;
    case TopologySpec::Kind::kMatrix:
      doc["topology"] = {{"matrix", MatrixJson(c.topology.matrix)}};
      break;
    case TopologySpec::Kind::kTrivial:
      doc["topology"] = {{"trivial", true}};
      break;
  }
  doc["convexity"] = std::string(ToString(c.convexity));
  const ScheduleSet& s = c.schedules;
  doc["stepsize"] = {{"x", {{"lambda0", s.lambda_x.lambda0}, {"v", s.lambda_x.v}}},
                     {"y", {{"lambda0", s.lambda_y.lambda0}, {"v", s.lambda_y.v}}},
                     {"z", {{"lambda0", s.lambda_z.lambda0}, {"v", s.lambda_z.v}}}};
  auto noise_json = [](const std::vector<NoiseSchedule>& list) {
    json sigma = json::array();
    json varsigma = json::array();
    for (const auto& n : list) {
      sigma.push_back(n.sigma);
      varsigma.push_back(n.varsigma);
    }
    return json{{"sigma", sigma}, {"varsigma", varsigma}};
  };
  doc["noise"] = {{"enabled", s.noise_enabled},
                  {"x", noise_json(s.noise_x)},
                  {"y", noise_json(s.noise_y)},
                  {"z", noise_json(s.noise_z)}};
  if (c.sensitivity) {
    const OracleConstants& o = *c.sensitivity;
    doc["sensitivity"] = {{"L_l", o.lip_l},         {"L_h", o.lip_h},
                          {"Lbar_l", o.lip_grad_l}, {"Lbar_h", o.lip_grad_h},
                          {"d_l", o.bound_l},       {"d_z", o.bound_z}};
  }
  if (c.calibrate_epsilon) doc["calibration"] = {{"epsilon", *c.calibrate_epsilon}};
  doc["T"] = c.horizon;
  doc["seeds"] = c.seeds;
  doc["master_seed"] = c.master_seed;
  if (c.init.x_lo && c.init.x_hi) doc["init"] = {{"x_range", {*c.init.x_lo, *c.init.x_hi}}};
  doc["metrics"] = {{"running_means", c.running_means},
                    {"grid_per_decade", c.grid_per_decade},
                    {"dense_below", c.grid_dense_below}};
  return doc;
}

std::unique_ptr<Problem> BuildProblem(const RunConfig& c) {
  try {
    if (c.problem == "personalized") {
      PersonalizedSpec spec = c.personalized;
      spec.num_agents = c.num_agents();
      return std::make_unique<PersonalizedProblem>(spec);
    }
    QuadraticSpec spec = c.quadratic;
    spec.num_agents = c.num_agents();
    return std::make_unique<QuadraticProblem>(spec);
  } catch (const std::invalid_argument& err) {
    throw ConfigError("/" + c.problem, err.what());
  }
}

NetworkTopology BuildTopology(const RunConfig& c) {
  try {
    switch (c.topology.kind) {
      case TopologySpec::Kind::kRing:
        return NetworkTopology::Ring(c.topology.m, c.topology.w);
      case TopologySpec::Kind::kMatrix:
        return NetworkTopology::FromMatrix(c.topology.matrix);
      case TopologySpec::Kind::kTrivial:
        return NetworkTopology::Trivial();
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError("/topology", err.what());
  }
  throw ConfigError("/topology", "unknown topology kind");
}

SensitivityParams SensitivityFor(const RunConfig& c, const NetworkTopology& topology,
                                 int agent) {
  if (!c.sensitivity) throw ConfigError("/sensitivity", "missing sensitivity block");
  return MakeSensitivityParams(*c.sensitivity, topology.w_bar(), BlockDims(c).at(agent),
                               AggregateDim(c), c.schedules);
}

void ApplyCalibration(RunConfig& c, const NetworkTopology& topology, double epsilon) {
  for (int i = 0; i < c.num_agents(); ++i) {
    const CalibratedNoise cal = CalibrateNoise(
        epsilon, SensitivityFor(c, topology, i), NoiseOf(c.schedules, i));
    c.schedules.noise_x[i].sigma = cal.sigma_x;
    c.schedules.noise_y[i].sigma = cal.sigma_y;
    c.schedules.noise_z[i].sigma = cal.sigma_z;
  }
}

}  // namespace ldpagg
