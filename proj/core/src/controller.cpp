#include "teleop/controller.hpp"

#include <cmath>

namespace teleop {

void ControllerGains::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!(kp > 0.0) || !std::isfinite(kp)) throw ValidationError("gains: kp must be > 0");
  if (!ok(kv) || !ok(kd) || !ok(p_eps))
    throw ValidationError("gains: kv, kd and p_eps must be >= 0");
  if (nu && (!(*nu > 0.0) || !std::isfinite(*nu)))
    throw ValidationError("gains: nu must be > 0 when given");
}

double control_continuous(const ControllerGains& g, const JointState& own,
                          const JointState& remote_delayed) {
  return -g.kv * (own.v - remote_delayed.v) - (g.kd + g.p_eps) * own.v -
         g.kp * (own.q - remote_delayed.q);
}

double control_sampled(const ControllerGains& g, const LatchedState& latch) {
  if (!latch.own || !latch.remote) {
    throw NotYetInitialized("control_sampled: latch has no sample yet");
  }
  return control_continuous(g, *latch.own, *latch.remote);
}

DiscreteTF controller_z_tf(const ControllerGains& g, double T, DerivativeKernel kernel) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw ValidationError("controller_z_tf: sampling period must be > 0");
  const double kdv = g.derivative_gain();
  switch (kernel) {
    case DerivativeKernel::Tustin:
      // [2 kdv (z - 1) + Kp T (z + 1)] / [T (z + 1)]
      return DiscreteTF(Polynomial{-2.0 * kdv + g.kp * T, 2.0 * kdv + g.kp * T},
                        Polynomial{T, T});
    case DerivativeKernel::BackwardDifference:
      break;
  }
  // [kdv (z - 1) + Kp T z] / (T z)
  return DiscreteTF(Polynomial{-kdv, kdv + g.kp * T}, Polynomial{0.0, T});
}

double passivity_gain_rule(double kp, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw ValidationError("passivity_gain_rule: nu must be > 0");
  if (!(kp > 0.0) || !std::isfinite(kp))
    throw ValidationError("passivity_gain_rule: kp must be > 0");
  return 0.5 * nu * kp;
}

}  // namespace teleop
