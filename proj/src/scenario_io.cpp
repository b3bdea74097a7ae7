#include "hcr/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace hcr {

namespace {

std::string where(const std::string& source, int line, int column) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ':' << line << ':' << column;
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    if (m.is_null()) throw ScenarioError(source_, 0, 0, msg);
    throw ScenarioError(source_, m.line + 1, m.column + 1, msg);
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  /// Rejects keys outside `allowed`.
  void check_keys(const YAML::Node& map, const std::string& what, std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key, const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, "missing required key '" + std::string(key) + "' in " + what);
    return n;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be an integer");
    try {
      return n.as<long long>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be an integer, got '" + n.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be true or false");
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be true or false, got '" + n.Scalar() + "'");
    }
  }

  std::string string(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  Vec2 vec2(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be a two-element list [x, y]");
    return {number(n[0], what + "[0]"), number(n[1], what + "[1]")};
  }

  double number_or(const YAML::Node& map, const char* key, double dflt, const std::string& what) const {
    const YAML::Node n = map[key];
    return n ? number(n, what + "." + key) : dflt;
  }

 private:
  std::string source_;
};

GoalRegion read_goal(const Reader& rd, const YAML::Node& n) {
  rd.expect_map(n, "goal");
  const std::string type = rd.string(rd.require(n, "type", "goal"), "goal.type");
  try {
    if (type == "disk") {
      rd.check_keys(n, "goal", {"type", "center", "radius"});
      return GoalRegion::disk(rd.vec2(rd.require(n, "center", "goal"), "goal.center"),
                              rd.number(rd.require(n, "radius", "goal"), "goal.radius"));
    }
    if (type == "ellipse") {
      rd.check_keys(n, "goal", {"type", "center", "semi_axes"});
      return GoalRegion::ellipse(rd.vec2(rd.require(n, "center", "goal"), "goal.center"),
                                 rd.vec2(rd.require(n, "semi_axes", "goal"), "goal.semi_axes"));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& err) {
    rd.fail(n, err.what());
  }
  rd.fail(n["type"], "goal.type must be 'disk' or 'ellipse', got '" + type + "'");
}

EvaderStrategySpec read_strategy(const Reader& rd, const YAML::Node& n, const std::string& what) {
  EvaderStrategySpec spec;
  if (!n) return spec;
  rd.expect_map(n, what);
  const std::string type = rd.string(rd.require(n, "type", what), what + ".type");
  if (type == "greedy_to_goal") {
    rd.check_keys(n, what, {"type"});
    spec.kind = EvaderPolicy::GreedyToGoal;
  } else if (type == "constant_heading") {
    rd.check_keys(n, what, {"type", "heading"});
    spec.kind = EvaderPolicy::ConstantHeading;
    spec.heading = rd.number(rd.require(n, "heading", what), what + ".heading");
  } else if (type == "random_walk") {
    rd.check_keys(n, what, {"type", "sigma"});
    spec.kind = EvaderPolicy::RandomWalk;
    spec.sigma = rd.number_or(n, "sigma", spec.sigma, what);
    if (!(spec.sigma >= 0.0)) rd.fail(n["sigma"], what + ".sigma must be non-negative");
  } else if (type == "scripted") {
    rd.check_keys(n, what, {"type", "steps"});
    spec.kind = EvaderPolicy::Scripted;
    const YAML::Node steps = rd.require(n, "steps", what);
    if (!steps.IsSequence()) rd.fail(steps, what + ".steps must be a list");
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string sw = what + ".steps[" + std::to_string(k) + "]";
      const YAML::Node st = steps[k];
      rd.expect_map(st, sw);
      rd.check_keys(st, sw, {"t", "u"});
      ScriptStep s{rd.number(rd.require(st, "t", sw), sw + ".t"), rd.vec2(rd.require(st, "u", sw), sw + ".u")};
      if (s.u.norm() > 1.0 + 1e-12) rd.fail(st["u"], sw + ".u must have norm <= 1");
      if (s.t < last) rd.fail(st["t"], sw + ".t must be non-decreasing");
      last = s.t;
      spec.script.push_back(s);
    }
  } else {
    rd.fail(n["type"], what + ".type must be one of greedy_to_goal, constant_heading, scripted, random_walk");
  }
  return spec;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_vec(YAML::Emitter& out, const Vec2& v) {
  out << YAML::Flow << YAML::BeginSeq << num(v.x()) << num(v.y()) << YAML::EndSeq;
}

}  // namespace

ScenarioError::ScenarioError(const std::string& source, int line, int column, const std::string& message)
    : Error(Errc::ParseError, where(source, line, column) + ": " + message), line_(line), column_(column) {}

ScenarioFile parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& ex) {
    throw ScenarioError(source, ex.mark.line + 1, ex.mark.column + 1, ex.msg);
  }
  const Reader rd(source);
  if (!root || root.IsNull()) throw ScenarioError(source, 1, 1, "empty scenario document");
  rd.expect_map(root, "scenario");
  rd.check_keys(root, "scenario",
                {"version", "name", "goal", "pursuers", "evaders", "simulation", "numeric", "output"});

  ScenarioFile file;
  const YAML::Node ver = rd.require(root, "version", "scenario");
  file.version = static_cast<int>(rd.integer(ver, "version"));
  if (file.version != kScenarioVersion) {
    rd.fail(ver, "unsupported version " + std::to_string(file.version) + " (expected " +
                     std::to_string(kScenarioVersion) + ")");
  }
  Scenario& s = file.scenario;
  if (root["name"]) s.name = rd.string(root["name"], "name");
  s.goal = read_goal(rd, rd.require(root, "goal", "scenario"));

  const YAML::Node ps = rd.require(root, "pursuers", "scenario");
  if (!ps.IsSequence()) rd.fail(ps, "pursuers must be a list");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string w = "pursuers[" + std::to_string(i) + "]";
    const YAML::Node p = ps[i];
    rd.expect_map(p, w);
    rd.check_keys(p, w, {"id", "position", "heading", "speed", "kappa", "capture_radius"});
    PursuerState st;
    st.pos = rd.vec2(rd.require(p, "position", w), w + ".position");
    st.heading = wrap_to_2pi(rd.number_or(p, "heading", 0.0, w));
    st.v_max = rd.number(rd.require(p, "speed", w), w + ".speed");
    st.kappa = rd.number(rd.require(p, "kappa", w), w + ".kappa");
    st.capture_radius = rd.number(rd.require(p, "capture_radius", w), w + ".capture_radius");
    try {
      st.validate();
    } catch (const Error& err) {
      rd.fail(p, err.what());
    }
    s.pursuer_ids.push_back(p["id"] ? rd.string(p["id"], w + ".id") : "P" + std::to_string(i + 1));
    s.pursuers.push_back(st);
  }

  const YAML::Node es = rd.require(root, "evaders", "scenario");
  if (!es.IsSequence()) rd.fail(es, "evaders must be a list");
  for (std::size_t j = 0; j < es.size(); ++j) {
    const std::string w = "evaders[" + std::to_string(j) + "]";
    const YAML::Node e = es[j];
    rd.expect_map(e, w);
    rd.check_keys(e, w, {"id", "position", "speed", "strategy"});
    EvaderState st;
    st.pos = rd.vec2(rd.require(e, "position", w), w + ".position");
    st.v_max = rd.number(rd.require(e, "speed", w), w + ".speed");
    try {
      st.validate();
    } catch (const Error& err) {
      rd.fail(e, err.what());
    }
    s.evader_ids.push_back(e["id"] ? rd.string(e["id"], w + ".id") : "E" + std::to_string(j + 1));
    s.evaders.push_back(st);
    s.strategies.push_back(read_strategy(rd, e["strategy"], w + ".strategy"));
  }

  if (const YAML::Node sim = root["simulation"]) {
    rd.expect_map(sim, "simulation");
    rd.check_keys(sim, "simulation", {"dt", "max_time", "seed", "z_mode", "relaxed", "threads"});
    s.dt = rd.number_or(sim, "dt", s.dt, "simulation");
    s.max_time = rd.number_or(sim, "max_time", s.max_time, "simulation");
    if (sim["seed"]) {
      const long long seed = rd.integer(sim["seed"], "simulation.seed");
      if (seed < 0) rd.fail(sim["seed"], "simulation.seed must be non-negative");
      s.seed = static_cast<std::uint64_t>(seed);
    }
    if (sim["z_mode"]) {
      try {
        s.z_mode = zmode_from_string(rd.string(sim["z_mode"], "simulation.z_mode"));
      } catch (const ScenarioError&) {
        throw;
      } catch (const Error& err) {
        rd.fail(sim["z_mode"], err.what());
      }
    }
    if (sim["relaxed"]) s.relaxed = rd.boolean(sim["relaxed"], "simulation.relaxed");
    if (sim["threads"]) {
      const long long th = rd.integer(sim["threads"], "simulation.threads");
      if (th < 1 || th > 256) rd.fail(sim["threads"], "simulation.threads must be in [1, 256]");
      s.threads = static_cast<unsigned>(th);
    }
    if (!(s.dt > 0.0)) rd.fail(sim["dt"] ? sim["dt"] : sim, "simulation.dt must be positive");
    if (!(s.max_time > 0.0)) rd.fail(sim["max_time"] ? sim["max_time"] : sim, "simulation.max_time must be positive");
  }

  if (const YAML::Node nc = root["numeric"]) {
    rd.expect_map(nc, "numeric");
    rd.check_keys(nc, "numeric", {"eps_active", "eps_dist", "max_iter"});
    s.numeric.eps_active = rd.number_or(nc, "eps_active", s.numeric.eps_active, "numeric");
    s.numeric.eps_dist = rd.number_or(nc, "eps_dist", s.numeric.eps_dist, "numeric");
    if (nc["max_iter"]) s.numeric.max_iter = static_cast<int>(rd.integer(nc["max_iter"], "numeric.max_iter"));
    try {
      s.numeric.validate();
    } catch (const Error& err) {
      rd.fail(nc, err.what());
    }
  }

  if (const YAML::Node out = root["output"]) {
    rd.expect_map(out, "output");
    rd.check_keys(out, "output", {"dir", "snapshot_times"});
    if (out["dir"]) file.output_dir = rd.string(out["dir"], "output.dir");
    if (const YAML::Node st = out["snapshot_times"]) {
      if (!st.IsSequence()) rd.fail(st, "output.snapshot_times must be a list");
      for (std::size_t k = 0; k < st.size(); ++k) {
        s.snapshot_times.push_back(rd.number(st[k], "output.snapshot_times[" + std::to_string(k) + "]"));
      }
    }
  }

  try {
    s.validate();
  } catch (const Error& err) {
    rd.fail(root, err.what());
  }
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << file.version;
  if (!s.name.empty()) out << YAML::Key << "name" << YAML::Value << s.name;

  out << YAML::Key << "goal" << YAML::Value << YAML::BeginMap;
  if (const auto* d = std::get_if<GoalRegion::Disk>(&s.goal.kind())) {
    out << YAML::Key << "type" << YAML::Value << "disk";
    out << YAML::Key << "center" << YAML::Value;
    emit_vec(out, d->center);
    out << YAML::Key << "radius" << YAML::Value << num(d->radius);
  } else if (const auto* el = std::get_if<GoalRegion::Ellipse>(&s.goal.kind())) {
    out << YAML::Key << "type" << YAML::Value << "ellipse";
    out << YAML::Key << "center" << YAML::Value;
    emit_vec(out, el->center);
    out << YAML::Key << "semi_axes" << YAML::Value;
    emit_vec(out, el->semi_axes);
  } else {
    throw Error(Errc::InvalidArgument, "serialize_scenario: custom goal regions cannot be written");
  }
  out << YAML::EndMap;

  out << YAML::Key << "pursuers" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < s.pursuers.size(); ++i) {
    const auto& p = s.pursuers[i];
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << s.pursuer_ids[i];
    out << YAML::Key << "position" << YAML::Value;
    emit_vec(out, p.pos);
    out << YAML::Key << "heading" << YAML::Value << num(p.heading);
    out << YAML::Key << "speed" << YAML::Value << num(p.v_max);
    out << YAML::Key << "kappa" << YAML::Value << num(p.kappa);
    out << YAML::Key << "capture_radius" << YAML::Value << num(p.capture_radius);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "evaders" << YAML::Value << YAML::BeginSeq;
  for (std::size_t j = 0; j < s.evaders.size(); ++j) {
    const auto& e = s.evaders[j];
    const auto& st = s.strategies[j];
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << s.evader_ids[j];
    out << YAML::Key << "position" << YAML::Value;
    emit_vec(out, e.pos);
    out << YAML::Key << "speed" << YAML::Value << num(e.v_max);
    out << YAML::Key << "strategy" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "type" << YAML::Value << to_string(st.kind);
    if (st.kind == EvaderPolicy::ConstantHeading) out << YAML::Key << "heading" << YAML::Value << num(st.heading);
    if (st.kind == EvaderPolicy::RandomWalk) out << YAML::Key << "sigma" << YAML::Value << num(st.sigma);
    if (st.kind == EvaderPolicy::Scripted) {
      out << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
      for (const auto& step : st.script) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "t" << YAML::Value << num(step.t);
        out << YAML::Key << "u" << YAML::Value;
        emit_vec(out, step.u);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << num(s.dt);
  out << YAML::Key << "max_time" << YAML::Value << num(s.max_time);
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "z_mode" << YAML::Value << to_string(s.z_mode);
  out << YAML::Key << "relaxed" << YAML::Value << s.relaxed;
  out << YAML::Key << "threads" << YAML::Value << s.threads;
  out << YAML::EndMap;

  out << YAML::Key << "numeric" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "eps_active" << YAML::Value << num(s.numeric.eps_active);
  out << YAML::Key << "eps_dist" << YAML::Value << num(s.numeric.eps_dist);
  out << YAML::Key << "max_iter" << YAML::Value << s.numeric.max_iter;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  if (!file.output_dir.empty()) out << YAML::Key << "dir" << YAML::Value << file.output_dir;
  out << YAML::Key << "snapshot_times" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double t : s.snapshot_times) out << num(t);
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::EndMap;
  if (!out.good()) throw Error(Errc::InvalidState, std::string("serialize_scenario: ") + out.GetLastError());
  return std::string(out.c_str()) + "\n";
}

bool scenarios_equal(const ScenarioFile& a, const ScenarioFile& b) {
  const Scenario& x = a.scenario;
  const Scenario& y = b.scenario;
  auto pursuer_eq = [](const PursuerState& p, const PursuerState& q) {
    return p.pos == q.pos && p.heading == q.heading && p.v_max == q.v_max && p.kappa == q.kappa &&
           p.capture_radius == q.capture_radius;
  };
  auto evader_eq = [](const EvaderState& p, const EvaderState& q) {
    return p.pos == q.pos && p.v_max == q.v_max && p.status == q.status;
  };
  auto goal_eq = [](const GoalRegion& g, const GoalRegion& h) {
    const auto* d1 = std::get_if<GoalRegion::Disk>(&g.kind());
    const auto* d2 = std::get_if<GoalRegion::Disk>(&h.kind());
    if (d1 && d2) return d1->center == d2->center && d1->radius == d2->radius;
    const auto* e1 = std::get_if<GoalRegion::Ellipse>(&g.kind());
    const auto* e2 = std::get_if<GoalRegion::Ellipse>(&h.kind());
    if (e1 && e2) return e1->center == e2->center && e1->semi_axes == e2->semi_axes;
    return false;
  };
  if (a.version != b.version || a.output_dir != b.output_dir) return false;
  if (x.name != y.name || x.pursuer_ids != y.pursuer_ids || x.evader_ids != y.evader_ids) return false;
  if (!std::equal(x.pursuers.begin(), x.pursuers.end(), y.pursuers.begin(), y.pursuers.end(), pursuer_eq)) return false;
  if (!std::equal(x.evaders.begin(), x.evaders.end(), y.evaders.begin(), y.evaders.end(), evader_eq)) return false;
  if (x.strategies != y.strategies || !goal_eq(x.goal, y.goal)) return false;
  return x.dt == y.dt && x.max_time == y.max_time && x.z_mode == y.z_mode && x.seed == y.seed &&
         x.relaxed == y.relaxed && x.threads == y.threads && x.snapshot_times == y.snapshot_times &&
         x.numeric.eps_active == y.numeric.eps_active && x.numeric.eps_dist == y.numeric.eps_dist &&
         x.numeric.max_iter == y.numeric.max_iter;
}

}  // namespace hcr
