#pragma once

// Robot, operator and environment models: impedances, force-to-position
// plants, their ZOH discretization, the hybrid (h-parameter) matrix, and the
// unilateral wall.

#include "teleop/lti.hpp"

namespace teleop {

/// 1-DOF mass-damper robot.
struct RobotParams {
  double mass = 0.0;     // kg m^2
  double damping = 0.0;  // N m s / rad

  void validate() const;
  friend bool operator==(const RobotParams&, const RobotParams&) = default;
};

/// Terminating impedance Z(s) = m s + b + k / s (operator hand, environment).
struct ImpedanceModel {
  double mass = 0.0;
  double damping = 0.0;
  double stiffness = 0.0;

  static ImpedanceModel free() { return {}; }
  bool is_free() const noexcept {
    return mass == 0.0 && damping == 0.0 && stiffness == 0.0;
  }
  void validate() const;
  /// (m s^2 + b s + k) / s, or 0/1 for the free terminator.
  RationalTF as_tf() const;
  friend bool operator==(const ImpedanceModel&, const ImpedanceModel&) = default;
};

struct HybridMatrix {
  Complex h11, h12, h21, h22;
  double frequency = 0.0;
};

/// Unilateral spring-damper wall engaging for x > position.
struct WallModel {
  static constexpr double kDefaultStiffness = 1000.0;
  static constexpr double kDefaultDamping = 1.0;

  double position = 0.0;
  double stiffness = kDefaultStiffness;
  double damping = kDefaultDamping;

  void validate() const;
  /// Z(s) = b_w + k_w / s of the engaged wall (for linear analysis).
  ImpedanceModel contact_impedance() const { return {0.0, damping, stiffness}; }
  friend bool operator==(const WallModel&, const WallModel&) = default;
};

/// Z(s) = m s + b.
RationalTF robot_impedance(const RobotParams& p);

/// X/F = 1 / ((m + m') s^2 + (b + b') s + k): the robot's velocity loop closed
/// through the terminating impedance, integrated once for position.
RationalTF plant_position_tf(const RobotParams& p, const ImpedanceModel& terminator);

/// Exact step-invariant (ZOH) discretization of a strictly proper plant.
///
/// The plant is realized in controllable canonical form, the augmented matrix
/// exponential exp([[A, B], [0, 0]] T) gives (Phi, Gamma), and the transfer
/// function is recovered as
///   den = det(zI - Phi),  num = det(zI - Phi + Gamma C) - det(zI - Phi).
DiscreteTF sampled_plant_tf(const RationalTF& plant, double T);

HybridMatrix hybrid_at(const RationalTF& Zm, const RationalTF& Zs,
                       const RationalTF& Cm, const RationalTF& Cs, double omega);

/// |h11| + |h12 - 1| + |h21 + 1| + |h22|; zero for an ideally transparent pair.
double transparency_error(const HybridMatrix& h);

/// Reaction torque the wall exerts on the slave (>= 0, pushes back).
double wall_force(double x, double v, const WallModel& wall);

}  // namespace teleop
