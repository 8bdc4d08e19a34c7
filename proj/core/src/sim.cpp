#include "teleop/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

namespace teleop {

namespace {

using State = std::array<double, 4>;  // x_m, v_m, x_s, v_s

bool all_finite(const State& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

State axpy(const State& y, double a, const State& k) {
  return {y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]};
}

template <class Deriv>
State rk4_step(const State& y, double t, double h, Deriv&& f) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = f(t + h, axpy(y, h, k3));
  State out;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

std::int64_t ticks_of(double seconds, double h, const char* what) {
  const double raw = seconds / h;
  const double r = std::round(raw);
  if (std::abs(raw - r) > 1e-6) {
    throw ValidationError(std::string(what) + " must be a multiple of the integration step");
  }
  return static_cast<std::int64_t>(r);
}

struct Packet {
  std::int64_t arrival_tick;
  std::int64_t source_tick;
  JointState state;
};

}  // namespace

// ---------------------------------------------------------------------------
// Nonidealities

void NonidealityConfig::validate() const {
  if (!(encoder_step > 0.0)) throw ValidationError("nonidealities: encoder_step must be > 0");
  if (!(actuator_limit > 0.0)) throw ValidationError("nonidealities: actuator_limit must be > 0");
  if (!(force_to_volts > 0.0)) throw ValidationError("nonidealities: force_to_volts must be > 0");
  if (!(velocity_filter_cutoff > 0.0))
    throw ValidationError("nonidealities: velocity_filter_cutoff must be > 0");
  if (!(noise_std >= 0.0)) throw ValidationError("nonidealities: noise_std must be >= 0");
}

double quantize_position(double x, double step) { return std::floor(x / step) * step; }

double saturate_force(double force, const NonidealityConfig& cfg) {
  const double lim = cfg.force_limit();
  return std::clamp(force, -lim, lim);
}

SensorChain::SensorChain(const NonidealityConfig& cfg, double sample_period,
                         std::uint64_t seed)
    : cfg_(cfg),
      a_(std::exp(-2.0 * std::numbers::pi * cfg.velocity_filter_cutoff * sample_period)),
      rng_(seed) {
  cfg_.validate();
}

JointState SensorChain::measure(const JointState& truth) {
  double q = truth.q;
  double v = truth.v;
  if (cfg_.noise_std > 0.0) {
    q += cfg_.noise_std * normal_(rng_);
    v += cfg_.noise_std * normal_(rng_);
  }
  if (!primed_) {
    v_filtered_ = v;
    primed_ = true;
  } else {
    v_filtered_ = a_ * v_filtered_ + (1.0 - a_) * v;
  }
  return {quantize_position(q, cfg_.encoder_step), v_filtered_};
}

std::vector<JointState> apply_nonidealities(std::span<const JointState> raw,
                                            const NonidealityConfig& cfg,
                                            double sample_period, std::uint64_t rng_seed) {
  SensorChain chain(cfg, sample_period, rng_seed);
  std::vector<JointState> out;
  out.reserve(raw.size());
  for (const JointState& s : raw) out.push_back(chain.measure(s));
  return out;
}

// ---------------------------------------------------------------------------
// Scenario

void SimScenario::validate() const {
  master.validate();
  slave.validate();
  human.validate();
  wall.validate();
  // All-zero gains are accepted here as an open-loop run; the analysis path
  // still requires kp > 0.
  const bool open_loop = gains.kp == 0.0 && gains.kv == 0.0 && gains.kd == 0.0 &&
                         gains.p_eps == 0.0 && !gains.nu;
  if (!open_loop) gains.validate();
  channel.validate();
  if (nonidealities) nonidealities->validate();
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("run: duration must be > 0");
  if (integrator_substeps < 4) throw ValidationError("run: substeps must be >= 4");
  if (!(operator_force.start >= 0.0) || operator_force.stop < operator_force.start ||
      operator_force.stop > duration || !std::isfinite(operator_force.magnitude)) {
    throw ValidationError("operator_force: window must lie within [0, duration]");
  }
  if (!(verdict.position_bound > 0.0) || !(verdict.settle_window > 0.0) ||
      !(verdict.settle_tol > 0.0)) {
    throw ValidationError("run: verdict bound, window and tolerance must be > 0");
  }
  if (analysis.grid_points < 2) throw ValidationError("run: grid_points must be >= 2");
  if (mode == ControlMode::Continuous &&
      (channel.d1 != 0 || channel.d2 != 0 || channel.loop_latency != 0.0)) {
    throw ValidationError("run: continuous control mode requires zero channel delay");
  }
  ticks_of(channel.loop_latency, substep(), "channel: loop_latency");
}

TeleopSystem analysis_system(const SimScenario& sc) {
  TeleopSystem sys;
  sys.master = sc.master;
  sys.slave = sc.slave;
  sys.human = sc.human;
  sys.environment =
      sc.analysis_wall_contact ? sc.wall.contact_impedance() : ImpedanceModel::free();
  sys.gains = sc.gains;
  sys.kernel = sc.kernel;
  return sys;
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Sample:
      return "sample";
    case EventKind::HoldMaster:
      return "hold_m";
    case EventKind::HoldSlave:
      return "hold_s";
  }
  return "?";
}

std::vector<SimEvent> SimTrace::events_of(EventKind kind) const {
  std::vector<SimEvent> out;
  for (const SimEvent& e : events)
    if (e.kind == kind) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

SimTrace run_scenario(const SimScenario& sc) {
  sc.validate();

  const int sub = sc.integrator_substeps;
  const double h = sc.substep();
  const std::int64_t n_steps = std::llround(sc.duration / h);
  const std::int64_t latency = ticks_of(sc.channel.loop_latency, h, "channel: loop_latency");
  const std::int64_t fwd_ticks = static_cast<std::int64_t>(sc.channel.d1) * sub + latency;
  const std::int64_t bwd_ticks = static_cast<std::int64_t>(sc.channel.d2) * sub + latency;
  const bool sampled = sc.mode == ControlMode::Sampled;

  const double m_master = sc.master.mass + sc.human.mass;
  const ControllerGains& g = sc.gains;

  std::seed_seq seeds{static_cast<std::uint32_t>(sc.seed),
                      static_cast<std::uint32_t>(sc.seed >> 32)};
  std::array<std::uint64_t, 3> streams{};
  {
    std::array<std::uint32_t, 6> words{};
    seeds.generate(words.begin(), words.end());
    for (std::size_t i = 0; i < streams.size(); ++i)
      streams[i] = (static_cast<std::uint64_t>(words[2 * i]) << 32) | words[2 * i + 1];
  }
  std::optional<SensorChain> sense_m, sense_s;
  if (sc.nonidealities) {
    sense_m.emplace(*sc.nonidealities, sc.channel.T, streams[0]);
    sense_s.emplace(*sc.nonidealities, sc.channel.T, streams[1]);
  }
  std::mt19937_64 jitter_rng(streams[2]);
  const std::int64_t min_interval = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(sc.channel.eps_min / h - 1e-9)));
  std::uniform_int_distribution<std::int64_t> jitter_ticks(std::min<std::int64_t>(min_interval, sub),
                                                           sub);

  auto actuate = [&](double tau) {
    return sc.nonidealities ? saturate_force(tau, *sc.nonidealities) : tau;
  };

  // Startup: remote values frozen at the local initial condition.
  LatchedState latch_m{sc.master_initial, sc.master_initial, 0.0, 0.0};
  LatchedState latch_s{sc.slave_initial, sc.slave_initial, 0.0, 0.0};
  double tau_m = actuate(control_sampled(g, latch_m));
  double tau_s = actuate(control_sampled(g, latch_s));

  std::deque<Packet> to_slave, to_master;
  std::int64_t next_sample = 0;

  State y{sc.master_initial.q, sc.master_initial.v, sc.slave_initial.q, sc.slave_initial.v};

  auto torques = [&](const State& s) -> std::pair<double, double> {
    if (sampled) return {tau_m, tau_s};
    const JointState jm{s[0], s[1]};
    const JointState js{s[2], s[3]};
    return {actuate(control_continuous(g, jm, js)), actuate(control_continuous(g, js, jm))};
  };

  // Exogenous force of the piece being integrated; pieces never straddle a
  // profile discontinuity, so it is constant over all RK4 stages.
  double piece_force = 0.0;
  auto deriv = [&](double, const State& s) -> State {
    const auto [tm, ts] = torques(s);
    const double fh = piece_force - sc.human.damping * s[1] - sc.human.stiffness * s[0];
    const double am = (fh + tm - sc.master.damping * s[1]) / m_master;
    const double as = (ts - wall_force(s[2], s[3], sc.wall) - sc.slave.damping * s[3]) /
                      sc.slave.mass;
    return {s[1], am, s[3], as};
  };

  SimTrace tr;
  tr.substep = h;
  const auto rows = static_cast<std::size_t>(n_steps + 1);
  for (auto* v : {&tr.t, &tr.x_m, &tr.v_m, &tr.x_s, &tr.v_s, &tr.F_m, &tr.F_s, &tr.F_h, &tr.F_e})
    v->reserve(rows);

  auto record = [&](std::int64_t tick, const State& s) {
    const double t = static_cast<double>(tick) * h;
    const auto [tm, ts] = torques(s);
    tr.t.push_back(t);
    tr.x_m.push_back(s[0]);
    tr.v_m.push_back(s[1]);
    tr.x_s.push_back(s[2]);
    tr.v_s.push_back(s[3]);
    tr.F_m.push_back(tm);
    tr.F_s.push_back(ts);
    tr.F_h.push_back(sc.operator_force.at(t) - sc.human.damping * s[1] -
                     sc.human.stiffness * s[0]);
    tr.F_e.push_back(-wall_force(s[2], s[3], sc.wall));
  };

  const std::array<double, 2> breakpoints{sc.operator_force.start, sc.operator_force.stop};

  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;

    if (sampled) {
      if (k == next_sample) {
        JointState jm{y[0], y[1]};
        JointState js{y[2], y[3]};
        if (sense_m) jm = sense_m->measure(jm);
        if (sense_s) js = sense_s->measure(js);
        latch_m.own = jm;
        latch_m.sample_time = t;
        latch_s.own = js;
        latch_s.sample_time = t;
        to_slave.push_back({k + fwd_ticks, k, jm});
        to_master.push_back({k + bwd_ticks, k, js});
        tr.events.push_back({EventKind::Sample, k, t, k, t});
        next_sample += sc.channel.jitter ? jitter_ticks(jitter_rng) : sub;
      }
      while (!to_master.empty() && to_master.front().arrival_tick == k) {
        const Packet p = to_master.front();
        to_master.pop_front();
        latch_m.remote = p.state;
        latch_m.remote_sample_time = static_cast<double>(p.source_tick) * h;
        tau_m = actuate(control_sampled(g, latch_m));
        tr.events.push_back({EventKind::HoldMaster, k, t, p.source_tick,
                             static_cast<double>(p.source_tick) * h});
      }
      while (!to_slave.empty() && to_slave.front().arrival_tick == k) {
        const Packet p = to_slave.front();
        to_slave.pop_front();
        latch_s.remote = p.state;
        latch_s.remote_sample_time = static_cast<double>(p.source_tick) * h;
        tau_s = actuate(control_sampled(g, latch_s));
        tr.events.push_back({EventKind::HoldSlave, k, t, p.source_tick,
                             static_cast<double>(p.source_tick) * h});
      }
    }

    record(k, y);
    if (k == n_steps) break;

    // Integrate [t, t + h], splitting at operator force discontinuities.
    const double t_end = static_cast<double>(k + 1) * h;
    double t0 = t;
    auto piece = [&](double a, double b) {
      piece_force = sc.operator_force.at(0.5 * (a + b));
      y = rk4_step(y, a, b - a, deriv);
    };
    for (double bp : breakpoints) {
      if (bp > t0 && bp < t_end) {
        piece(t0, bp);
        t0 = bp;
      }
    }
    piece(t0, t_end);

    if (!all_finite(y)) {
      record(k + 1, y);
      tr.divergence_time = t_end;
      break;
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Post-processing

SimVerdict verdict(const SimTrace& trace, double position_bound, double settle_window,
                   double settle_tol) {
  SimVerdict v;
  v.divergence_time = trace.divergence_time;
  bool finite = !trace.divergence_time.has_value();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double a = std::abs(trace.x_m[i]);
    const double b = std::abs(trace.x_s[i]);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(trace.v_m[i]) ||
        !std::isfinite(trace.v_s[i])) {
      finite = false;
      if (!v.divergence_time) v.divergence_time = trace.t[i];
      continue;
    }
    v.max_abs_position = std::max({v.max_abs_position, a, b});
  }
  v.bounded = finite && v.max_abs_position <= position_bound;

  if (trace.size() > 0) {
    const double t_from = trace.t.back() - settle_window;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace.t[i] < t_from) continue;
      const double m = std::max(std::abs(trace.v_m[i]), std::abs(trace.v_s[i]));
      v.final_velocity_max = std::isfinite(m) ? std::max(v.final_velocity_max, m)
                                              : std::numeric_limits<double>::infinity();
    }
  }
  v.settling_ok = finite && v.final_velocity_max < settle_tol;
  return v;
}

std::vector<double> sampling_intervals(const SimTrace& trace) {
  std::vector<double> out;
  const auto samples = trace.events_of(EventKind::Sample);
  for (std::size_t i = 1; i < samples.size(); ++i)
    out.push_back(static_cast<double>(samples[i].tick - samples[i - 1].tick) * trace.substep);
  return out;
}

double measured_sup_induced_delay(const SimTrace& trace) {
  double sup = 0.0;
  for (EventKind kind : {EventKind::HoldMaster, EventKind::HoldSlave}) {
    const auto holds = trace.events_of(kind);
    if (holds.empty()) continue;
    std::size_t j = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double t = trace.t[i];
      if (t < holds.front().t) continue;
      while (j + 1 < holds.size() && holds[j + 1].t <= t) ++j;
      sup = std::max(sup, t - holds[j].source_t);
    }
  }
  return sup;
}

std::vector<SweepRow> sweep_period(const SimScenario& sc_template,
                                   std::span<const double> T_values, unsigned max_threads) {
  std::vector<double> periods(T_values.begin(), T_values.end());
  std::sort(periods.begin(), periods.end());
  std::vector<SweepRow> rows(periods.size());

  auto run_row = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.T = periods[i];
    try {
      SimScenario sc = sc_template;
      sc.channel.T = periods[i];
      sc.channel.eps_min = std::min(sc_template.channel.eps_min, periods[i]);
      const SimTrace trace = run_scenario(sc);
      row.verdict = verdict(trace, sc.verdict);
      row.report = analyze(analysis_system(sc), sc.channel, sc.analysis);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  unsigned n_threads = max_threads ? max_threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(rows.size())));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) run_row(i);
      });
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << "t,x_m,v_m,x_s,v_s,F_m,F_s,F_h,F_e\n";
  char buf[512];
  // Adding +0.0 folds -0 into 0 so identical states print identically.
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", trace.t[i],
                  trace.x_m[i] + 0.0, trace.v_m[i] + 0.0, trace.x_s[i] + 0.0,
                  trace.v_s[i] + 0.0, trace.F_m[i] + 0.0, trace.F_s[i] + 0.0,
                  trace.F_h[i] + 0.0, trace.F_e[i] + 0.0);
    os << buf;
  }
}

void write_events_csv(std::ostream& os, const SimTrace& trace) {
  os << "kind,t\n";
  char buf[64];
  for (const SimEvent& e : trace.events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.t);
    os << to_string(e.kind) << ',' << buf << '\n';
  }
}

}  // namespace teleop
