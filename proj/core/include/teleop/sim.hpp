#pragma once

// Deterministic hybrid simulation of the sampled-data teleoperator.
//
// Both plants are integrated with fixed-step RK4 at h = T / substeps. Samplers
// fire on the integration grid; samples travel through constant-delay queues
// and update event-driven zero-order holds, which keep the controller
// outputs constant until the next delivery. All instants are integer tick
// counts, so a hold event is its sample event plus exactly d * substeps ticks.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "teleop/controller.hpp"
#include "teleop/plant.hpp"
#include "teleop/stability.hpp"

namespace teleop {

/// Rectangular exogenous operator torque on the master.
struct OperatorForceProfile {
  static constexpr double kDefaultMagnitude = 1.0;

  double start = 0.0;  // s
  double stop = 0.0;   // s
  double magnitude = kDefaultMagnitude;  // N m

  double at(double t) const noexcept { return (t >= start && t < stop) ? magnitude : 0.0; }
  friend bool operator==(const OperatorForceProfile&, const OperatorForceProfile&) = default;
};

/// Sensor and actuator limitations of the bench rig.
struct NonidealityConfig {
  static constexpr double kEncoderStep = 2.0 * 3.14159265358979323846 / 4096.0;

  double encoder_step = kEncoderStep;   // rad
  double actuator_limit = 5.0;          // V, symmetric
  double force_to_volts = 4.054;        // V / N
  double velocity_filter_cutoff = 50.0; // Hz
  double noise_std = 0.0;               // sensor units, scales N(0, 1)

  double force_limit() const noexcept { return actuator_limit / force_to_volts; }
  void validate() const;
  friend bool operator==(const NonidealityConfig&, const NonidealityConfig&) = default;
};

double quantize_position(double x, double step);
double saturate_force(double force, const NonidealityConfig& cfg);

/// Measurement chain of one robot: noise, encoder quantization, first-order
/// low-pass on velocity. Stateful (filter memory, generator).
class SensorChain {
 public:
  SensorChain(const NonidealityConfig& cfg, double sample_period, std::uint64_t seed);

  JointState measure(const JointState& truth);
  double filter_coefficient() const noexcept { return a_; }

 private:
  NonidealityConfig cfg_;
  double a_;
  bool primed_ = false;
  double v_filtered_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Batch form: runs a fresh SensorChain over uniformly sampled raw states.
std::vector<JointState> apply_nonidealities(std::span<const JointState> raw,
                                            const NonidealityConfig& cfg,
                                            double sample_period, std::uint64_t rng_seed);

enum class ControlMode {
  Sampled,     // held controller outputs, updated at hold events
  Continuous,  // control law evaluated at every integrator stage (no delay)
};

struct VerdictOptions {
  double position_bound = 10.0;  // rad
  double settle_window = 5.0;    // s
  double settle_tol = 0.01;      // rad/s
  friend bool operator==(const VerdictOptions&, const VerdictOptions&) = default;
};

struct SimScenario {
  RobotParams master;
  RobotParams slave;
  ImpedanceModel human;
  WallModel wall;
  ControllerGains gains;
  ChannelConfig channel;
  OperatorForceProfile operator_force;
  double duration = 0.0;  // s
  int integrator_substeps = 10;
  std::optional<NonidealityConfig> nonidealities;
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::Sampled;
  JointState master_initial;
  JointState slave_initial;
  VerdictOptions verdict;

  // Analysis-only settings.
  AnalysisOptions analysis;
  DerivativeKernel kernel = DerivativeKernel::BackwardDifference;
  bool analysis_wall_contact = false;  // terminate the slave with the engaged wall

  double substep() const noexcept { return channel.T / integrator_substeps; }
  void validate() const;
  friend bool operator==(const SimScenario&, const SimScenario&) = default;
};

/// Frequency-domain view of a scenario (free environment unless
/// analysis_wall_contact).
TeleopSystem analysis_system(const SimScenario& sc);

enum class EventKind { Sample, HoldMaster, HoldSlave };
const char* to_string(EventKind k);

struct SimEvent {
  EventKind kind;
  std::int64_t tick;         // integration step index
  double t;                  // tick * h
  std::int64_t source_tick;  // sample that caused a hold (== tick for samples)
  double source_t;
};

struct SimTrace {
  double substep = 0.0;
  std::vector<double> t, x_m, v_m, x_s, v_s, F_m, F_s, F_h, F_e;
  std::vector<SimEvent> events;
  std::optional<double> divergence_time;

  std::size_t size() const noexcept { return t.size(); }
  std::vector<SimEvent> events_of(EventKind kind) const;
};

/// Throws ValidationError for invalid scenarios. A non-finite state ends the
/// run early; the offending row is kept and divergence_time is set.
SimTrace run_scenario(const SimScenario& sc);

struct SimVerdict {
  bool bounded = false;
  double max_abs_position = 0.0;
  bool settling_ok = false;
  double final_velocity_max = 0.0;
  std::optional<double> divergence_time;
};

SimVerdict verdict(const SimTrace& trace, double position_bound, double settle_window,
                   double settle_tol);
inline SimVerdict verdict(const SimTrace& trace, const VerdictOptions& o) {
  return verdict(trace, o.position_bound, o.settle_window, o.settle_tol);
}

/// Intervals between consecutive sample events.
std::vector<double> sampling_intervals(const SimTrace& trace);

/// max over trace rows of t - (source sample time of the value held at t),
/// taken over both holds after their first update.
double measured_sup_induced_delay(const SimTrace& trace);

struct SweepRow {
  double T = 0.0;
  std::optional<SimVerdict> verdict;
  std::optional<StabilityReport> report;
  std::string error;  // empty unless the row failed
};

/// One simulation plus one frequency-domain report per period, sorted by T.
/// Rows run concurrently; each row is itself deterministic.
std::vector<SweepRow> sweep_period(const SimScenario& sc_template,
                                   std::span<const double> T_values,
                                   unsigned max_threads = 0);

/// `t,x_m,v_m,x_s,v_s,F_m,F_s,F_h,F_e`, 17 significant digits.
void write_trace_csv(std::ostream& os, const SimTrace& trace);
/// `kind,t` with kind in {sample, hold_m, hold_s}.
void write_events_csv(std::ostream& os, const SimTrace& trace);

}  // namespace teleop
