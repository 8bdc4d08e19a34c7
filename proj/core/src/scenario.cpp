#include "teleop/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace teleop {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"master", {"mass", "damping", "initial_position", "initial_velocity"}},
      {"slave", {"mass", "damping", "initial_position", "initial_velocity"}},
      {"human", {"mass", "damping", "stiffness"}},
      {"wall", {"position", "stiffness", "damping", "analysis_contact"}},
      {"gains", {"kp", "kv", "kd", "p_eps", "nu"}},
      {"channel", {"T", "d1", "d2", "eps_min", "alpha", "loop_latency", "jitter"}},
      {"operator_force", {"start", "stop", "magnitude"}},
      {"nonidealities",
       {"enabled", "encoder_step", "actuator_limit", "force_to_volts",
        "velocity_filter_cutoff", "noise_std"}},
      {"run",
       {"duration", "substeps", "seed", "mode", "grid_points", "grid_spacing", "refine",
        "kernel", "position_bound", "settle_window", "settle_tol"}},
  };
  return s;
}

const std::set<std::string>& required_sections() {
  static const std::set<std::string> s{"master", "slave", "human",          "wall",
                                       "gains",  "channel", "operator_force", "run"};
  return s;
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::map<std::string, Section> tokenize(std::string_view text) {
  std::map<std::string, Section> doc;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no, current);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!schema().contains(name)) throw ParseError("unknown section '" + name + "'", line_no, name);
      if (doc.contains(name)) throw ParseError("duplicate section '" + name + "'", line_no, name);
      doc[name];
      current = name;
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, current);
      if (current.empty()) throw ParseError("key outside of any section", line_no, current);
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", line_no, current);
      if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no, current);
      if (!schema().at(current).contains(key))
        throw ParseError("unknown key '" + key + "'", line_no, current);
      auto& sec = doc[current];
      if (sec.contains(key)) throw ParseError("duplicate key '" + key + "'", line_no, current);
      sec[key] = Entry{value, line_no, false};
    }
    if (eol == text.size()) break;
  }
  return doc;
}

class Reader {
 public:
  Reader(std::map<std::string, Section> doc) : doc_(std::move(doc)) {}

  bool has_section(const std::string& s) const { return doc_.contains(s); }

  void require_section(const std::string& s) const {
    if (!doc_.contains(s)) throw ValidationError(s + ": required");
  }

  const Entry* find(const std::string& sec, const std::string& key) {
    auto it = doc_.find(sec);
    if (it == doc_.end()) return nullptr;
    auto kt = it->second.find(key);
    if (kt == it->second.end()) return nullptr;
    kt->second.used = true;
    return &kt->second;
  }

  double number(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) throw ValidationError(sec + "." + key + ": required");
    return parse_number(sec, key, *e);
  }

  double number_or(const std::string& sec, const std::string& key, double fallback) {
    const Entry* e = find(sec, key);
    return e ? parse_number(sec, key, *e) : fallback;
  }

  std::optional<double> optional_number(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    return parse_number(sec, key, *e);
  }

  long long integer(const std::string& sec, const std::string& key) {
    const double v = number(sec, key);
    return to_integer(sec, key, v);
  }

  long long integer_or(const std::string& sec, const std::string& key, long long fallback) {
    const Entry* e = find(sec, key);
    return e ? to_integer(sec, key, parse_number(sec, key, *e)) : fallback;
  }

  std::uint64_t unsigned_or(const std::string& sec, const std::string& key,
                            std::uint64_t fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    const auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end)
      throw ParseError("expected an unsigned integer for '" + key + "'", e->line, sec);
    return v;
  }

  bool boolean_or(const std::string& sec, const std::string& key, bool fallback) {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ParseError("expected true or false for '" + key + "'", e->line, sec);
  }

  std::string word_or(const std::string& sec, const std::string& key, std::string fallback) {
    const Entry* e = find(sec, key);
    return e ? e->value : fallback;
  }

  int line_of(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    return e ? e->line : 0;
  }

 private:
  static double parse_number(const std::string& sec, const std::string& key, const Entry& e) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    const auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end || !std::isfinite(v))
      throw ParseError("expected a number for '" + key + "', got '" + e.value + "'", e.line, sec);
    return v;
  }

  static long long to_integer(const std::string& sec, const std::string& key, double v) {
    if (v != std::floor(v) || std::abs(v) > 1e15)
      throw ValidationError(sec + "." + key + ": must be an integer");
    return static_cast<long long>(v);
  }

  std::map<std::string, Section> doc_;
};

RobotParams read_robot(Reader& r, const std::string& sec, JointState& initial) {
  RobotParams p{r.number(sec, "mass"), r.number(sec, "damping")};
  initial.q = r.number_or(sec, "initial_position", 0.0);
  initial.v = r.number_or(sec, "initial_velocity", 0.0);
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(ControlMode m) {
  return m == ControlMode::Continuous ? "continuous" : "sampled";
}
const char* to_string(DerivativeKernel k) {
  return k == DerivativeKernel::Tustin ? "tustin" : "backward_difference";
}
const char* to_string(GridSpacing s) { return s == GridSpacing::Linear ? "linear" : "log"; }
const char* to_string(Criterion c) {
  return c == Criterion::DampingBound ? "eq21" : "small_gain";
}
const char* to_string(BracketStatus s) {
  switch (s) {
    case BracketStatus::Crossing:
      return "crossing";
    case BracketStatus::AlwaysPass:
      return "no_bracket_always_pass";
    case BracketStatus::AlwaysFail:
      return "no_bracket_always_fail";
  }
  return "?";
}

SimScenario parse_scenario(std::string_view text) {
  Reader r(tokenize(text));
  for (const auto& s : required_sections()) r.require_section(s);

  SimScenario sc;
  sc.master = read_robot(r, "master", sc.master_initial);
  sc.slave = read_robot(r, "slave", sc.slave_initial);

  sc.human.mass = r.number_or("human", "mass", 0.0);
  sc.human.damping = r.number("human", "damping");
  sc.human.stiffness = r.number("human", "stiffness");

  sc.wall.position = r.number("wall", "position");
  sc.wall.stiffness = r.number_or("wall", "stiffness", WallModel::kDefaultStiffness);
  sc.wall.damping = r.number_or("wall", "damping", WallModel::kDefaultDamping);
  sc.analysis_wall_contact = r.boolean_or("wall", "analysis_contact", false);

  sc.gains.kp = r.number("gains", "kp");
  sc.gains.kv = r.number("gains", "kv");
  sc.gains.kd = r.number("gains", "kd");
  sc.gains.p_eps = r.number("gains", "p_eps");
  sc.gains.nu = r.optional_number("gains", "nu");

  sc.channel.T = r.number("channel", "T");
  const long long d1 = r.integer("channel", "d1");
  const long long d2 = r.integer("channel", "d2");
  if (d1 < 0 || d2 < 0 || d1 > 1'000'000 || d2 > 1'000'000)
    throw ValidationError("channel: d1 and d2 must be non-negative integers");
  sc.channel.d1 = static_cast<int>(d1);
  sc.channel.d2 = static_cast<int>(d2);
  sc.channel.eps_min = r.number_or("channel", "eps_min", sc.channel.T);
  sc.channel.alpha = r.number_or("channel", "alpha", 0.0);
  sc.channel.loop_latency = r.number_or("channel", "loop_latency", 0.0);
  sc.channel.jitter = r.boolean_or("channel", "jitter", false);

  sc.operator_force.start = r.number("operator_force", "start");
  sc.operator_force.stop = r.number("operator_force", "stop");
  sc.operator_force.magnitude =
      r.number_or("operator_force", "magnitude", OperatorForceProfile::kDefaultMagnitude);

  if (r.has_section("nonidealities") && r.boolean_or("nonidealities", "enabled", true)) {
    NonidealityConfig n;
    n.encoder_step = r.number_or("nonidealities", "encoder_step", n.encoder_step);
    n.actuator_limit = r.number_or("nonidealities", "actuator_limit", n.actuator_limit);
    n.force_to_volts = r.number_or("nonidealities", "force_to_volts", n.force_to_volts);
    n.velocity_filter_cutoff =
        r.number_or("nonidealities", "velocity_filter_cutoff", n.velocity_filter_cutoff);
    n.noise_std = r.number_or("nonidealities", "noise_std", n.noise_std);
    sc.nonidealities = n;
  }

  sc.duration = r.number("run", "duration");
  const long long sub = r.integer_or("run", "substeps", 10);
  if (sub < 4 || sub > 1'000'000) throw ValidationError("run.substeps: must be in [4, 1e6]");
  sc.integrator_substeps = static_cast<int>(sub);
  sc.seed = r.unsigned_or("run", "seed", 0);

  const auto mode = r.word_or("run", "mode", "sampled");
  if (mode == "sampled") {
    sc.mode = ControlMode::Sampled;
  } else if (mode == "continuous") {
    sc.mode = ControlMode::Continuous;
  } else {
    throw ParseError("mode must be sampled or continuous", r.line_of("run", "mode"), "run");
  }

  const long long grid = r.integer_or("run", "grid_points", kDefaultGridPoints);
  if (grid < 2) throw ValidationError("run.grid_points: must be >= 2");
  sc.analysis.grid_points = static_cast<std::size_t>(grid);
  const auto spacing = r.word_or("run", "grid_spacing", "log");
  if (spacing == "log") {
    sc.analysis.spacing = GridSpacing::Log;
  } else if (spacing == "linear") {
    sc.analysis.spacing = GridSpacing::Linear;
  } else {
    throw ParseError("grid_spacing must be log or linear", r.line_of("run", "grid_spacing"),
                     "run");
  }
  sc.analysis.refine = r.boolean_or("run", "refine", true);

  const auto kernel = r.word_or("run", "kernel", "backward_difference");
  if (kernel == "backward_difference") {
    sc.kernel = DerivativeKernel::BackwardDifference;
  } else if (kernel == "tustin") {
    sc.kernel = DerivativeKernel::Tustin;
  } else {
    throw ParseError("kernel must be backward_difference or tustin", r.line_of("run", "kernel"),
                     "run");
  }

  sc.verdict.position_bound = r.number_or("run", "position_bound", sc.verdict.position_bound);
  sc.verdict.settle_window = r.number_or("run", "settle_window", sc.verdict.settle_window);
  sc.verdict.settle_tol = r.number_or("run", "settle_tol", sc.verdict.settle_tol);

  sc.validate();
  return sc;
}

SimScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const SimScenario& sc) {
  std::ostringstream o;
  auto robot = [&](const char* name, const RobotParams& p, const JointState& init) {
    o << '[' << name << "]\n"
      << "mass = " << fmt(p.mass) << "\n"
      << "damping = " << fmt(p.damping) << "\n"
      << "initial_position = " << fmt(init.q) << "\n"
      << "initial_velocity = " << fmt(init.v) << "\n\n";
  };
  robot("master", sc.master, sc.master_initial);
  robot("slave", sc.slave, sc.slave_initial);

  o << "[human]\n"
    << "mass = " << fmt(sc.human.mass) << "\n"
    << "damping = " << fmt(sc.human.damping) << "\n"
    << "stiffness = " << fmt(sc.human.stiffness) << "\n\n";

  o << "[wall]\n"
    << "position = " << fmt(sc.wall.position) << "\n"
    << "stiffness = " << fmt(sc.wall.stiffness) << "\n"
    << "damping = " << fmt(sc.wall.damping) << "\n"
    << "analysis_contact = " << (sc.analysis_wall_contact ? "true" : "false") << "\n\n";

  o << "[gains]\n"
    << "kp = " << fmt(sc.gains.kp) << "\n"
    << "kv = " << fmt(sc.gains.kv) << "\n"
    << "kd = " << fmt(sc.gains.kd) << "\n"
    << "p_eps = " << fmt(sc.gains.p_eps) << "\n";
  if (sc.gains.nu) o << "nu = " << fmt(*sc.gains.nu) << "\n";
  o << "\n";

  o << "[channel]\n"
    << "T = " << fmt(sc.channel.T) << "\n"
    << "d1 = " << sc.channel.d1 << "\n"
    << "d2 = " << sc.channel.d2 << "\n"
    << "eps_min = " << fmt(sc.channel.eps_min) << "\n"
    << "alpha = " << fmt(sc.channel.alpha) << "\n"
    << "loop_latency = " << fmt(sc.channel.loop_latency) << "\n"
    << "jitter = " << (sc.channel.jitter ? "true" : "false") << "\n\n";

  o << "[operator_force]\n"
    << "start = " << fmt(sc.operator_force.start) << "\n"
    << "stop = " << fmt(sc.operator_force.stop) << "\n"
    << "magnitude = " << fmt(sc.operator_force.magnitude) << "\n\n";

  if (sc.nonidealities) {
    const auto& n = *sc.nonidealities;
    o << "[nonidealities]\n"
      << "enabled = true\n"
      << "encoder_step = " << fmt(n.encoder_step) << "\n"
      << "actuator_limit = " << fmt(n.actuator_limit) << "\n"
      << "force_to_volts = " << fmt(n.force_to_volts) << "\n"
      << "velocity_filter_cutoff = " << fmt(n.velocity_filter_cutoff) << "\n"
      << "noise_std = " << fmt(n.noise_std) << "\n\n";
  }

  o << "[run]\n"
    << "duration = " << fmt(sc.duration) << "\n"
    << "substeps = " << sc.integrator_substeps << "\n"
    << "seed = " << sc.seed << "\n"
    << "mode = " << to_string(sc.mode) << "\n"
    << "grid_points = " << sc.analysis.grid_points << "\n"
    << "grid_spacing = " << to_string(sc.analysis.spacing) << "\n"
    << "refine = " << (sc.analysis.refine ? "true" : "false") << "\n"
    << "kernel = " << to_string(sc.kernel) << "\n"
    << "position_bound = " << fmt(sc.verdict.position_bound) << "\n"
    << "settle_window = " << fmt(sc.verdict.settle_window) << "\n"
    << "settle_tol = " << fmt(sc.verdict.settle_tol) << "\n";
  return o.str();
}

void save_scenario(const std::filesystem::path& path, const SimScenario& sc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_scenario(sc);
}

std::string scenario_hash(const SimScenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_scenario(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace teleop
