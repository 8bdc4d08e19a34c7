#include "teleop/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace teleop {

namespace {

constexpr double kPoleRelTol = 64.0 * std::numeric_limits<double>::epsilon();
constexpr double kZohSeriesCutoff = 1e-8;

void require_positive_period(double T, const char* who) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ValidationError(std::string(who) + ": sampling period must be > 0");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
  trim();
}

Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) {
  trim();
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Complex Polynomial::operator()(Complex x) const noexcept {
  Complex acc{0.0, 0.0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::magnitude_scale(Complex x) const noexcept {
  const double r = std::abs(x);
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coefficient(i) + b.coefficient(i);
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-1.0) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(double k, const Polynomial& p) {
  std::vector<double> out = p.c_;
  for (double& c : out) c *= k;
  return Polynomial(std::move(out));
}

// ---------------------------------------------------------------------------
// Rational

template <class Domain>
Rational<Domain>::Rational(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) {
    throw ValidationError("transfer function denominator is identically zero");
  }
  for (double c : num_.coefficients())
    if (!std::isfinite(c)) throw ValidationError("non-finite numerator coefficient");
  for (double c : den_.coefficients())
    if (!std::isfinite(c)) throw ValidationError("non-finite denominator coefficient");
}

template <class Domain>
Complex Rational<Domain>::operator()(Complex x) const {
  const Complex d = den_(x);
  const double scale = den_.magnitude_scale(x);
  if (std::abs(d) <= kPoleRelTol * scale || !std::isfinite(std::abs(d))) {
    throw PoleHit("transfer function evaluated at a pole (x = " +
                  std::to_string(x.real()) + (x.imag() < 0 ? "" : "+") +
                  std::to_string(x.imag()) + "j)");
  }
  return num_(x) / d;
}

template class Rational<LaplaceDomain>;
template class Rational<ZDomain>;

Complex eval_tf(const RationalTF& tf, Complex s) { return tf(s); }
Complex eval_tf(const DiscreteTF& tf, Complex z) { return tf(z); }

// ---------------------------------------------------------------------------
// Sampling kernels

Complex zoh_factor(Complex s, double T) {
  require_positive_period(T, "zoh_factor");
  const Complex x = s * T;
  if (std::abs(x) < kZohSeriesCutoff) return 1.0 - x / 2.0 + x * x / 6.0;
  return (1.0 - std::exp(-x)) / x;
}

Complex backward_diff_gain(Complex z, double T) {
  require_positive_period(T, "backward_diff_gain");
  if (z == Complex{0.0, 0.0}) throw DegenerateZ("backward_diff_gain: z = 0");
  return (z - 1.0) / (T * z);
}

Complex tustin_gain(Complex z, double T) {
  require_positive_period(T, "tustin_gain");
  if (z == Complex{-1.0, 0.0}) throw DegenerateZ("tustin_gain: z = -1");
  return (2.0 / T) * (z - 1.0) / (z + 1.0);
}

Complex derivative_kernel_gain(Complex z, double T, DerivativeKernel kernel) {
  switch (kernel) {
    case DerivativeKernel::BackwardDifference:
      return backward_diff_gain(z, T);
    case DerivativeKernel::Tustin:
      return tustin_gain(z, T);
  }
  return backward_diff_gain(z, T);
}

// ---------------------------------------------------------------------------
// Frequency grids

FrequencyGrid::FrequencyGrid(std::vector<double> points, double nyquist)
    : points_(std::move(points)), nyquist_(nyquist) {
  if (points_.empty()) throw BadGrid("frequency grid is empty");
  if (!(nyquist_ > 0.0)) throw BadGrid("nyquist frequency must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > 0.0) || points_[i] > nyquist_) {
      throw BadGrid("grid point outside (0, pi/T]");
    }
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw BadGrid("grid points must be strictly increasing");
    }
  }
}

FrequencyGrid make_grid(double T, std::size_t n_points, GridSpacing spacing) {
  require_positive_period(T, "make_grid");
  if (n_points < 2) throw BadGrid("make_grid: need at least 2 points");

  const double nyquist = std::numbers::pi / T;
  std::vector<double> pts(n_points);
  const double n = static_cast<double>(n_points);
  if (spacing == GridSpacing::Linear) {
    for (std::size_t i = 0; i < n_points; ++i)
      pts[i] = nyquist * static_cast<double>(i + 1) / n;
  } else {
    const double lo = std::log(nyquist / kLogGridSpan);
    const double hi = std::log(nyquist);
    for (std::size_t i = 0; i < n_points; ++i)
      pts[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (n - 1.0));
  }
  pts.back() = nyquist;
  return FrequencyGrid(std::move(pts), nyquist);
}

std::vector<ComplexResponse> frequency_response(const RationalTF& tf,
                                                const FrequencyGrid& grid) {
  std::vector<ComplexResponse> out;
  out.reserve(grid.size());
  for (double w : grid.points()) out.push_back({w, tf(Complex{0.0, w})});
  return out;
}

std::vector<ComplexResponse> frequency_response(const DiscreteTF& tf,
                                                const FrequencyGrid& grid,
                                                double T) {
  std::vector<ComplexResponse> out;
  out.reserve(grid.size());
  for (double w : grid.points())
    out.push_back({w, tf(std::polar(1.0, w * T))});
  return out;
}

}  // namespace teleop
