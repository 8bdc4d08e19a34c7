#pragma once

// PD-like coordination plus dissipation, shared by master and slave.
//
//   tau = -Kv (v_own - v_remote) - (Kd + P_eps) v_own - Kp (q_own - q_remote)
//
// The remote arguments are the delayed peer signals. The sampled form is the
// same arithmetic on held samples; the z-domain form feeds the stability test.

#include <optional>

#include "teleop/lti.hpp"

namespace teleop {

struct ControllerGains {
  double kp = 0.0;     // N m / rad
  double kv = 0.0;     // N m s / rad, velocity coordination
  double kd = 0.0;     // N m s / rad, dissipation
  double p_eps = 0.0;  // N m s / rad, extra damping
  std::optional<double> nu;  // s, delay upper bound used by the gain rule

  /// Kv + Kd + P_eps: everything multiplying the derivative kernel.
  double derivative_gain() const noexcept { return kv + kd + p_eps; }

  /// Throws ValidationError unless kp > 0 and the other gains are >= 0.
  void validate() const;
  friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

struct JointState {
  double q = 0.0;  // rad
  double v = 0.0;  // rad/s
  friend bool operator==(const JointState&, const JointState&) = default;
};

double control_continuous(const ControllerGains& g, const JointState& own,
                          const JointState& remote_delayed);

/// Most recent local sample and most recent delivered remote sample.
struct LatchedState {
  std::optional<JointState> own;
  std::optional<JointState> remote;
  double sample_time = 0.0;         // s, instant the own sample was taken
  double remote_sample_time = 0.0;  // s, instant the remote sample was taken
};

/// Continuous law on the latched values. Throws NotYetInitialized until both
/// sides of the latch hold a sample.
double control_sampled(const ControllerGains& g, const LatchedState& latch);

/// C(z) = (Kv + Kd + P_eps) * kernel(z) + Kp, as a rational in z.
///
/// The printed law carries an overall minus sign (it is a restoring torque);
/// the returned transfer function is the feedback-gain magnitude used by the
/// small-gain test.
DiscreteTF controller_z_tf(const ControllerGains& g, double T,
                           DerivativeKernel kernel = DerivativeKernel::BackwardDifference);

/// Kd = nu Kp / 2 (passivity rule for round-trip delay bound nu).
double passivity_gain_rule(double kp, double nu);

}  // namespace teleop
