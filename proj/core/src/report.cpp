#include "teleop/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "teleop/scenario.hpp"

#ifndef TELEOP_VERSION_STRING
#define TELEOP_VERSION_STRING "0.0.0"
#endif

namespace teleop {

using nlohmann::json;

namespace {

// JSON has no inf/nan; those are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("bad number '" + s + "'", 0, "report");
  }
  return j.get<double>();
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

json stability_json(const StabilityReport& s) {
  return {
      {"period", {{"value", num(s.period)}, {"units", "s"}}},
      {"small_gain",
       {{"criterion", "sup_w |M_m N_m + M_s N_s| < 1 on (0, pi/T]"},
        {"value", num(s.small_gain_value)},
        {"grid_sup", num(s.grid_sup)},
        {"units", "dimensionless"},
        {"argmax_frequency", {{"value", num(s.argmax_frequency)}, {"units", "rad/s"}}},
        {"grid_size", s.grid_size},
        {"excluded_points", s.excluded_points},
        {"pass", s.small_gain_pass}}},
      {"damping_bound",
       {{"criterion", "b > Kp T + 2 Kd - 2 P_eps - 2 Kv"},
        {"bound", num(s.eq21_bound)},
        {"units", "N m s/rad"},
        {"pass_master", s.eq21_pass_master},
        {"pass_slave", s.eq21_pass_slave}}},
  };
}

StabilityReport stability_from(const json& j) {
  StabilityReport s;
  s.period = get_num(j.at("period").at("value"));
  const json& sg = j.at("small_gain");
  s.small_gain_value = get_num(sg.at("value"));
  s.grid_sup = get_num(sg.at("grid_sup"));
  s.argmax_frequency = get_num(sg.at("argmax_frequency").at("value"));
  s.grid_size = sg.at("grid_size").get<std::size_t>();
  s.excluded_points = sg.at("excluded_points").get<std::size_t>();
  s.small_gain_pass = sg.at("pass").get<bool>();
  const json& db = j.at("damping_bound");
  s.eq21_bound = get_num(db.at("bound"));
  s.eq21_pass_master = db.at("pass_master").get<bool>();
  s.eq21_pass_slave = db.at("pass_slave").get<bool>();
  return s;
}

json verdict_json(const SimVerdict& v) {
  json j = {
      {"bounded", v.bounded},
      {"max_abs_position", {{"value", num(v.max_abs_position)}, {"units", "rad"}}},
      {"settling_ok", v.settling_ok},
      {"final_velocity_max", {{"value", num(v.final_velocity_max)}, {"units", "rad/s"}}},
  };
  j["divergence_time"] = v.divergence_time ? json{{"value", num(*v.divergence_time)},
                                                  {"units", "s"}}
                                           : json(nullptr);
  return j;
}

SimVerdict verdict_from(const json& j) {
  SimVerdict v;
  v.bounded = j.at("bounded").get<bool>();
  v.max_abs_position = get_num(j.at("max_abs_position").at("value"));
  v.settling_ok = j.at("settling_ok").get<bool>();
  v.final_velocity_max = get_num(j.at("final_velocity_max").at("value"));
  if (!j.at("divergence_time").is_null())
    v.divergence_time = get_num(j.at("divergence_time").at("value"));
  return v;
}

json search_json(const PeriodSearch& p, Criterion c) {
  return {
      {"criterion", to_string(c)},
      {"status", to_string(p.status)},
      {"period", {{"value", num(p.period)}, {"units", "s"}}},
      {"pass_at_lo", p.pass_at_lo},
      {"pass_at_hi", p.pass_at_hi},
      {"bracket", {{"lo", num(p.bracket_lo)}, {"hi", num(p.bracket_hi)}, {"units", "s"}}},
      {"iterations", p.iterations},
  };
}

std::pair<PeriodSearch, Criterion> search_from(const json& j) {
  PeriodSearch p;
  const auto crit = j.at("criterion").get<std::string>();
  const Criterion c = crit == "eq21" ? Criterion::DampingBound : Criterion::SmallGain;
  const auto st = j.at("status").get<std::string>();
  if (st == "crossing") {
    p.status = BracketStatus::Crossing;
  } else if (st == "no_bracket_always_pass") {
    p.status = BracketStatus::AlwaysPass;
  } else if (st == "no_bracket_always_fail") {
    p.status = BracketStatus::AlwaysFail;
  } else {
    throw ParseError("unknown period search status '" + st + "'", 0, "report");
  }
  p.period = get_num(j.at("period").at("value"));
  p.pass_at_lo = j.at("pass_at_lo").get<bool>();
  p.pass_at_hi = j.at("pass_at_hi").get<bool>();
  p.bracket_lo = get_num(j.at("bracket").at("lo"));
  p.bracket_hi = get_num(j.at("bracket").at("hi"));
  p.iterations = j.at("iterations").get<int>();
  return {p, c};
}

bool same_stability(const StabilityReport& a, const StabilityReport& b) {
  return same(a.period, b.period) && same(a.small_gain_value, b.small_gain_value) &&
         same(a.grid_sup, b.grid_sup) && a.small_gain_pass == b.small_gain_pass &&
         same(a.argmax_frequency, b.argmax_frequency) && a.grid_size == b.grid_size &&
         a.excluded_points == b.excluded_points && same(a.eq21_bound, b.eq21_bound) &&
         a.eq21_pass_master == b.eq21_pass_master && a.eq21_pass_slave == b.eq21_pass_slave;
}

bool same_verdict(const SimVerdict& a, const SimVerdict& b) {
  return a.bounded == b.bounded && same(a.max_abs_position, b.max_abs_position) &&
         a.settling_ok == b.settling_ok && same(a.final_velocity_max, b.final_velocity_max) &&
         a.divergence_time.has_value() == b.divergence_time.has_value() &&
         (!a.divergence_time || same(*a.divergence_time, *b.divergence_time));
}

bool same_search(const PeriodSearch& a, const PeriodSearch& b) {
  return same(a.period, b.period) && a.status == b.status && a.pass_at_lo == b.pass_at_lo &&
         a.pass_at_hi == b.pass_at_hi && same(a.bracket_lo, b.bracket_lo) &&
         same(a.bracket_hi, b.bracket_hi) && a.iterations == b.iterations;
}

}  // namespace

const char* tool_version() { return TELEOP_VERSION_STRING; }

AnalysisReport make_report(const SimScenario& sc, const StabilityReport& stability) {
  AnalysisReport r;
  r.provenance.scenario_hash = scenario_hash(sc);
  r.provenance.seed = sc.seed;
  r.provenance.grid_size = stability.grid_size;
  r.provenance.tool_version = tool_version();
  r.stability = stability;
  return r;
}

std::string to_json(const AnalysisReport& r, int indent) {
  json j;
  j["schema_version"] = r.schema_version;
  j["provenance"] = {
      {"scenario_hash", r.provenance.scenario_hash},
      {"seed", r.provenance.seed},
      {"grid_size", r.provenance.grid_size},
      {"tool_version", r.provenance.tool_version},
  };
  j["stability"] = stability_json(r.stability);
  j["simulation"] = r.simulation ? verdict_json(*r.simulation) : json(nullptr);
  j["period_search"] = r.period_search
                           ? search_json(*r.period_search,
                                         r.period_criterion.value_or(Criterion::SmallGain))
                           : json(nullptr);
  return j.dump(indent);
}

AnalysisReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    AnalysisReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw ParseError("unsupported schema_version " + std::to_string(r.schema_version), 0,
                       "report");
    }
    const json& p = j.at("provenance");
    r.provenance.scenario_hash = p.at("scenario_hash").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.grid_size = p.at("grid_size").get<std::size_t>();
    r.provenance.tool_version = p.at("tool_version").get<std::string>();
    r.stability = stability_from(j.at("stability"));
    if (!j.at("simulation").is_null()) r.simulation = verdict_from(j.at("simulation"));
    if (!j.at("period_search").is_null()) {
      auto [ps, c] = search_from(j.at("period_search"));
      r.period_search = ps;
      r.period_criterion = c;
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0, "report");
  }
}

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
  if (a.schema_version != b.schema_version || !(a.provenance == b.provenance)) return false;
  if (!same_stability(a.stability, b.stability)) return false;
  if (a.simulation.has_value() != b.simulation.has_value()) return false;
  if (a.simulation && !same_verdict(*a.simulation, *b.simulation)) return false;
  if (a.period_search.has_value() != b.period_search.has_value()) return false;
  if (a.period_search && !same_search(*a.period_search, *b.period_search)) return false;
  return a.period_criterion.value_or(Criterion::SmallGain) ==
         b.period_criterion.value_or(Criterion::SmallGain);
}

std::string sweep_table_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "T,small_gain_value,small_gain_pass,eq21_bound,eq21_pass,bounded,max_abs_position,"
       "settling_ok,final_velocity_max,error\n";
  char buf[64];
  auto f = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const SweepRow& r : rows) {
    o << f(r.T) << ',';
    if (r.report) {
      o << f(r.report->small_gain_value) << ',' << (r.report->small_gain_pass ? 1 : 0) << ','
        << f(r.report->eq21_bound) << ',' << (r.report->eq21_pass() ? 1 : 0) << ',';
    } else {
      o << ",,,,";
    }
    if (r.verdict) {
      o << (r.verdict->bounded ? 1 : 0) << ',' << f(r.verdict->max_abs_position) << ','
        << (r.verdict->settling_ok ? 1 : 0) << ',' << f(r.verdict->final_velocity_max) << ',';
    } else {
      o << ",,,,";
    }
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    o << err << '\n';
  }
  return o.str();
}

}  // namespace teleop
