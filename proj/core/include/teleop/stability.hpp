#pragma once

// Absolute-stability machinery for the sampled-data teleoperator.
//
// The loop gain tested is |M_m N_m + M_s N_s| over (0, pi/T], with
//
//   r(jw)  = (T/2) (e^{-jwT} - 1) / (1 - cos wT)
//   N_m    = a b_s C r / (2 b_m b_s + a b_s C r + b_m C r)
//   N_s    =   b_m C r / (2 b_m b_s + a b_s C r + b_m C r)
//   M_i    = -1 + (2 b_i / r) G_i*(e^{jwT})
//
// where C is the z-domain controller at z = e^{jwT} and G_i* the ZOH
// discretized force-to-position plant including its termination. The
// closed-form damping condition b > Kp T + 2 Kd - 2 P_eps - 2 Kv is
// evaluated alongside.

#include <cstddef>
#include <span>
#include <vector>

#include "teleop/controller.hpp"
#include "teleop/lti.hpp"
#include "teleop/plant.hpp"

namespace teleop {

/// Sampling and network parameters. Delays are integer multiples of T.
struct ChannelConfig {
  double T = 0.0;         // s
  int d1 = 0;             // forward (master -> slave) delay in periods
  int d2 = 0;             // backward (slave -> master) delay in periods
  double eps_min = 0.0;   // s, minimum inter-sample interval
  double alpha = 0.0;     // position scaling
  double loop_latency = 0.0;  // s, extra constant latency ahead of both holds
  bool jitter = false;    // draw sampling intervals in [eps_min, T]

  double forward_delay() const noexcept { return d1 * T; }
  double backward_delay() const noexcept { return d2 * T; }
  double max_delay() const noexcept {
    return (d1 > d2 ? d1 : d2) * T + loop_latency;
  }

  void validate() const;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// Everything the frequency-domain test needs about the loop.
struct TeleopSystem {
  RobotParams master;
  RobotParams slave;
  ImpedanceModel human;
  ImpedanceModel environment;
  ControllerGains gains;
  DerivativeKernel kernel = DerivativeKernel::BackwardDifference;
};

struct MNTerms {
  Complex Mm, Ms, Nm, Ns;
  Complex loop_gain() const { return Mm * Nm + Ms * Ns; }
};

/// Evaluated in the stable form -(T/2)(1 + j cot(wT/2)), which equals the
/// printed ratio but does not cancel as w -> 0.
Complex r_kernel(double omega, double T);

/// Precomputed discrete plants and controller for one (system, channel) pair.
class LoopModel {
 public:
  LoopModel(const TeleopSystem& sys, const ChannelConfig& ch);

  /// Throws SingularDenominator or KernelSingular where the test is undefined.
  MNTerms mn_terms(double omega) const;
  double loop_gain_magnitude(double omega) const { return std::abs(mn_terms(omega).loop_gain()); }
  /// Left-hand side of the alpha = 0 inequality with the delay term D.
  double alpha_zero_condition(double omega) const;

  Complex controller_at(double omega) const;
  Complex sampled_master_at(double omega) const;
  Complex sampled_slave_at(double omega) const;

  const DiscreteTF& sampled_master() const noexcept { return gm_; }
  const DiscreteTF& sampled_slave() const noexcept { return gs_; }
  const DiscreteTF& controller() const noexcept { return c_; }
  const ChannelConfig& channel() const noexcept { return ch_; }

 private:
  double bm_, bs_;
  ChannelConfig ch_;
  DiscreteTF gm_, gs_, c_;
};

MNTerms mn_terms(const TeleopSystem& sys, const ChannelConfig& ch, double omega);
double alpha_zero_condition(const TeleopSystem& sys, const ChannelConfig& ch, double omega);

struct StabilityReport {
  double period = 0.0;               // s
  double small_gain_value = 0.0;     // refined sup |M_m N_m + M_s N_s|
  double grid_sup = 0.0;             // sup over grid points only
  bool small_gain_pass = false;      // value < 1 and no excluded points
  double argmax_frequency = 0.0;     // rad/s
  std::size_t grid_size = 0;
  std::size_t excluded_points = 0;   // singular frequencies skipped
  double eq21_bound = 0.0;           // Kp T + 2 Kd - 2 P_eps - 2 Kv
  bool eq21_pass_master = false;
  bool eq21_pass_slave = false;

  bool eq21_pass() const noexcept { return eq21_pass_master && eq21_pass_slave; }
};

struct AnalysisOptions {
  std::size_t grid_points = kDefaultGridPoints;
  GridSpacing spacing = GridSpacing::Log;
  bool refine = true;
  friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

StabilityReport small_gain_value(const TeleopSystem& sys, const ChannelConfig& ch,
                                 const FrequencyGrid& grid, bool refine = true);
StabilityReport analyze(const TeleopSystem& sys, const ChannelConfig& ch,
                        const AnalysisOptions& opts = {});

double eq21_bound(const ControllerGains& g, double T);

enum class Criterion { SmallGain, DampingBound };

enum class BracketStatus {
  Crossing,    // endpoints disagree; period is the located flip
  AlwaysPass,  // no flip, criterion holds on the whole range (returns T_hi)
  AlwaysFail,  // no flip, criterion fails on the whole range (returns T_lo)
};

struct PeriodSearch {
  double period = 0.0;
  BracketStatus status = BracketStatus::Crossing;
  bool pass_at_lo = false;
  bool pass_at_hi = false;
  double bracket_lo = 0.0;  // final bisection bracket
  double bracket_hi = 0.0;
  int iterations = 0;
};

inline constexpr double kPeriodSearchRelWidth = 1e-4;

bool criterion_passes(const TeleopSystem& sys, const ChannelConfig& ch,
                      Criterion criterion, const AnalysisOptions& opts = {});

/// Bisection on T until the bracket's relative width drops below 1e-4.
/// The usual orientation is pass at T_lo, fail at T_hi; a fail-to-pass flip
/// is located the same way and reported through pass_at_lo / pass_at_hi.
PeriodSearch max_stable_period(const TeleopSystem& sys, const ChannelConfig& ch_template,
                               Criterion criterion, double T_lo, double T_hi,
                               const AnalysisOptions& opts = {});

/// sup mu(t): the longest observed sampling interval plus the network delay.
double induced_delay_gamma(const ChannelConfig& ch, std::span<const double> observed_intervals);
double induced_delay_gamma(std::span<const double> observed_intervals, double eps_min,
                           double delay);

/// Sampling instants, the hold updates they cause, and the induced delay.
struct DelayModel {
  std::vector<double> sample_instants;       // t^_k
  std::vector<double> hold_update_instants;  // t_k = t^_k + delay
  double delay = 0.0;
  double gamma = 0.0;

  static DelayModel from_samples(std::vector<double> sample_instants, double delay,
                                 double eps_min);
  /// mu(t) = t - t^_k for the latest hold update t_k <= t. Negative before the
  /// first update.
  double induced_delay(double t) const;
};

}  // namespace teleop
