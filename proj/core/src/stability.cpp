#include "teleop/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace teleop {

namespace {

constexpr double kKernelSingularTol = 1e-14;
constexpr double kDenRelTol = 64.0 * std::numeric_limits<double>::epsilon();
constexpr int kGoldenIterations = 80;

Complex unit_circle(double omega, double T) { return std::polar(1.0, omega * T); }

void check_denominator(Complex den, double scale, const char* who) {
  if (!(std::abs(den) > kDenRelTol * scale)) {
    throw SingularDenominator(std::string(who) + ": denominator vanishes");
  }
}

// Golden-section search for the maximum of f on [a, b]. Points where f throws
// count as -inf.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto safe = [&](double x) {
    try {
      return f(x);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = safe(c);
  double fd = safe(d);
  for (int i = 0; i < kGoldenIterations && (b - a) > 1e-12 * b; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = safe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = safe(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

void ChannelConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("channel: T must be > 0");
  if (d1 < 0 || d2 < 0) throw ValidationError("channel: d1 and d2 must be >= 0");
  if (!(eps_min > 0.0) || eps_min > T)
    throw ValidationError("channel: eps_min must satisfy 0 < eps_min <= T");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("channel: alpha must be >= 0");
  if (!(loop_latency >= 0.0) || !std::isfinite(loop_latency))
    throw ValidationError("channel: loop_latency must be >= 0");
}

Complex r_kernel(double omega, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("r_kernel: T must be > 0");
  const double half = 0.5 * omega * T;
  const double s = std::sin(half);
  // 1 - cos(wT) = 2 sin^2(wT/2)
  if (!(2.0 * s * s >= kKernelSingularTol)) {
    throw KernelSingular("r_kernel: 1 - cos(wT) vanishes");
  }
  return Complex{-0.5 * T, -0.5 * T * std::cos(half) / s};
}

// ---------------------------------------------------------------------------
// LoopModel

LoopModel::LoopModel(const TeleopSystem& sys, const ChannelConfig& ch)
    : bm_(sys.master.damping),
      bs_(sys.slave.damping),
      ch_(ch),
      gm_(sampled_plant_tf(plant_position_tf(sys.master, sys.human), ch.T)),
      gs_(sampled_plant_tf(plant_position_tf(sys.slave, sys.environment), ch.T)),
      c_(controller_z_tf(sys.gains, ch.T, sys.kernel)) {}

Complex LoopModel::controller_at(double omega) const {
  return c_(unit_circle(omega, ch_.T));
}
Complex LoopModel::sampled_master_at(double omega) const {
  return gm_(unit_circle(omega, ch_.T));
}
Complex LoopModel::sampled_slave_at(double omega) const {
  return gs_(unit_circle(omega, ch_.T));
}

MNTerms LoopModel::mn_terms(double omega) const {
  const Complex r = r_kernel(omega, ch_.T);
  const Complex C = controller_at(omega);
  const double a = ch_.alpha;

  const Complex cr = C * r;
  const Complex den = 2.0 * bm_ * bs_ + a * bs_ * cr + bm_ * cr;
  check_denominator(den, 2.0 * bm_ * bs_ + (a * bs_ + bm_) * std::abs(cr), "mn_terms");

  MNTerms t;
  t.Nm = a * bs_ * cr / den;
  t.Ns = bm_ * cr / den;
  t.Mm = -1.0 + (2.0 * bm_ / r) * sampled_master_at(omega);
  t.Ms = -1.0 + (2.0 * bs_ / r) * sampled_slave_at(omega);
  return t;
}

double LoopModel::alpha_zero_condition(double omega) const {
  const Complex s{0.0, omega};
  const Complex r = r_kernel(omega, ch_.T);
  const Complex C = controller_at(omega);
  const double delay = ch_.forward_delay() + ch_.backward_delay();
  const Complex D = r * r * (1.0 - std::exp(-delay * s)) / 2.0;

  const Complex num_a = D + bs_ * C * r;
  const Complex num_b = D + bm_ * C * r;
  const Complex den = 2.0 * bm_ * bs_ * C * C + bs_ * C * C * C * r + bm_ * C * C * C * r + D;
  const double scale = 2.0 * bm_ * bs_ * std::norm(C) +
                       (bs_ + bm_) * std::pow(std::abs(C), 3) * std::abs(r) + std::abs(D);
  check_denominator(den, scale, "alpha_zero_condition");
  return (std::abs(num_a) + std::abs(num_b) + std::abs(D)) / std::abs(den);
}

MNTerms mn_terms(const TeleopSystem& sys, const ChannelConfig& ch, double omega) {
  return LoopModel(sys, ch).mn_terms(omega);
}

double alpha_zero_condition(const TeleopSystem& sys, const ChannelConfig& ch, double omega) {
  return LoopModel(sys, ch).alpha_zero_condition(omega);
}

// ---------------------------------------------------------------------------
// Reports

double eq21_bound(const ControllerGains& g, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("eq21_bound: T must be > 0");
  return g.kp * T + 2.0 * g.kd - 2.0 * g.p_eps - 2.0 * g.kv;
}

StabilityReport small_gain_value(const TeleopSystem& sys, const ChannelConfig& ch,
                                 const FrequencyGrid& grid, bool refine) {
  const LoopModel model(sys, ch);

  StabilityReport rep;
  rep.period = ch.T;
  rep.grid_size = grid.size();

  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v;
    try {
      v = model.loop_gain_magnitude(grid[i]);
    } catch (const Error&) {
      ++rep.excluded_points;
      continue;
    }
    if (!std::isfinite(v)) {
      ++rep.excluded_points;
      continue;
    }
    if (v > best) {
      best = v;
      best_i = i;
    }
  }

  if (best < 0.0) {
    rep.small_gain_value = std::numeric_limits<double>::infinity();
    rep.grid_sup = rep.small_gain_value;
    rep.argmax_frequency = grid.nyquist();
  } else {
    rep.grid_sup = best;
    rep.small_gain_value = best;
    rep.argmax_frequency = grid[best_i];
    if (refine && grid.size() > 1) {
      const double a = grid[best_i == 0 ? 0 : best_i - 1];
      const double b = grid[std::min(best_i + 1, grid.size() - 1)];
      const auto [w, v] = golden_max(
          [&](double om) { return model.loop_gain_magnitude(om); }, a, b);
      if (v > rep.small_gain_value) {
        rep.small_gain_value = v;
        rep.argmax_frequency = w;
      }
    }
  }
  rep.small_gain_pass = rep.small_gain_value < 1.0 && rep.excluded_points == 0;

  rep.eq21_bound = eq21_bound(sys.gains, ch.T);
  rep.eq21_pass_master = sys.master.damping > rep.eq21_bound;
  rep.eq21_pass_slave = sys.slave.damping > rep.eq21_bound;
  return rep;
}

StabilityReport analyze(const TeleopSystem& sys, const ChannelConfig& ch,
                        const AnalysisOptions& opts) {
  return small_gain_value(sys, ch, make_grid(ch.T, opts.grid_points, opts.spacing),
                          opts.refine);
}

bool criterion_passes(const TeleopSystem& sys, const ChannelConfig& ch,
                      Criterion criterion, const AnalysisOptions& opts) {
  if (criterion == Criterion::DampingBound) {
    const double bound = eq21_bound(sys.gains, ch.T);
    return sys.master.damping > bound && sys.slave.damping > bound;
  }
  return analyze(sys, ch, opts).small_gain_pass;
}

PeriodSearch max_stable_period(const TeleopSystem& sys, const ChannelConfig& ch_template,
                               Criterion criterion, double T_lo, double T_hi,
                               const AnalysisOptions& opts) {
  if (!(T_lo > 0.0) || !(T_hi > T_lo) || !std::isfinite(T_hi)) {
    throw ValidationError("max_stable_period: need 0 < T_lo < T_hi");
  }
  auto passes = [&](double T) {
    ChannelConfig ch = ch_template;
    ch.T = T;
    ch.eps_min = std::min(ch_template.eps_min > 0.0 ? ch_template.eps_min : T, T);
    return criterion_passes(sys, ch, criterion, opts);
  };

  PeriodSearch out;
  out.pass_at_lo = passes(T_lo);
  out.pass_at_hi = passes(T_hi);
  out.bracket_lo = T_lo;
  out.bracket_hi = T_hi;
  if (out.pass_at_lo == out.pass_at_hi) {
    out.status = out.pass_at_lo ? BracketStatus::AlwaysPass : BracketStatus::AlwaysFail;
    out.period = out.pass_at_lo ? T_hi : T_lo;
    return out;
  }

  double lo = T_lo;
  double hi = T_hi;
  while ((hi - lo) > kPeriodSearchRelWidth * hi) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid) == out.pass_at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++out.iterations;
  }
  out.status = BracketStatus::Crossing;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.period = 0.5 * (lo + hi);
  return out;
}

// ---------------------------------------------------------------------------
// Induced delay

double induced_delay_gamma(std::span<const double> observed_intervals, double eps_min,
                           double delay) {
  if (observed_intervals.empty())
    throw ValidationError("induced_delay_gamma: no sampling intervals");
  double longest = 0.0;
  for (double h : observed_intervals) {
    if (!(h > 0.0) || h < eps_min) {
      throw AssumptionViolated("sampling interval " + std::to_string(h) +
                               " s is below the minimum interval");
    }
    longest = std::max(longest, h);
  }
  return longest + delay;
}

double induced_delay_gamma(const ChannelConfig& ch, std::span<const double> observed_intervals) {
  return induced_delay_gamma(observed_intervals, ch.eps_min, ch.max_delay());
}

DelayModel DelayModel::from_samples(std::vector<double> sample_instants, double delay,
                                    double eps_min) {
  DelayModel m;
  m.delay = delay;
  m.sample_instants = std::move(sample_instants);
  m.hold_update_instants.reserve(m.sample_instants.size());
  for (double t : m.sample_instants) m.hold_update_instants.push_back(t + delay);

  std::vector<double> intervals;
  for (std::size_t k = 1; k < m.sample_instants.size(); ++k)
    intervals.push_back(m.sample_instants[k] - m.sample_instants[k - 1]);
  m.gamma = intervals.empty() ? delay : induced_delay_gamma(intervals, eps_min, delay);
  return m;
}

double DelayModel::induced_delay(double t) const {
  const auto it = std::upper_bound(hold_update_instants.begin(), hold_update_instants.end(), t);
  if (it == hold_update_instants.begin()) return -1.0;
  const auto k = static_cast<std::size_t>(std::distance(hold_update_instants.begin(), it)) - 1;
  return t - sample_instants[k];
}

}  // namespace teleop
